import itertools

import numpy as np
import pytest

from greeterbot.asr.latency import LatencyParams, Mode, measure_latency, simulate_latency
from oracles import latency_event_queue


def both(params):
    return (
        simulate_latency(params, Mode.STREAMING),
        simulate_latency(params, Mode.WHOLE_FILE),
    )


def oracle_both(p: LatencyParams):
    args = (p.recording_duration, p.chunk_duration, p.upload_rate,
            p.per_message_overhead, p.per_chunk_processing, p.finalization)
    return (
        latency_event_queue(*args, streaming=True),
        latency_event_queue(*args, streaming=False),
    )


def test_worked_example():
    params = LatencyParams(4.0, 0.5, 1.0, 0.0, 0.0, 0.5)
    stream, whole = both(params)
    assert stream == pytest.approx(5.0)
    assert whole == pytest.approx(8.5)
    o_stream, o_whole = oracle_both(params)
    assert stream == pytest.approx(o_stream)
    assert whole == pytest.approx(o_whole)


def test_zero_duration_costs_only_finalization():
    params = LatencyParams(0.0, 0.5, 1.0, 0.1, 0.2, 0.3)
    assert both(params) == (0.3, 0.3)


def test_server_bound_pipeline():
    # processing dominates: the decoder is busy back to back after chunk 1
    d = 0.5
    params = LatencyParams(4.0, d, 1e9, 0.0, 10 * d, 0.25)
    stream, whole = both(params)
    o_stream, o_whole = oracle_both(params)
    assert stream == pytest.approx(o_stream)
    assert whole == pytest.approx(o_whole)
    K = params.chunk_count
    # first chunk is ready at d; from then on the decoder never idles
    assert stream == pytest.approx(d + K * 10 * d + 0.25)
    assert stream <= whole


def test_model_matches_event_queue_oracle_on_random_params():
    rng = np.random.default_rng(31)
    for _ in range(200):
        params = LatencyParams(
            recording_duration=float(rng.uniform(0, 10)),
            chunk_duration=float(rng.uniform(0.05, 2.0)),
            upload_rate=float(rng.uniform(0.2, 5.0)),
            per_message_overhead=float(rng.uniform(0, 0.5)),
            per_chunk_processing=float(rng.uniform(0, 0.5)),
            finalization=float(rng.uniform(0, 1.0)),
        )
        stream, whole = both(params)
        o_stream, o_whole = oracle_both(params)
        assert stream == pytest.approx(o_stream, abs=1e-9)
        assert whole == pytest.approx(o_whole, abs=1e-9)


def test_streaming_dominates_across_sweep():
    for T, rate, p in itertools.product((2.0, 4.0, 8.0), (0.5, 1.0, 2.0), (0.0, 0.05, 0.2)):
        params = LatencyParams(T, 0.5, rate, 0.0, p, 0.5)
        stream, whole = both(params)
        assert stream <= whole + 1e-12, f"streaming lost at T={T} rate={rate} p={p}"


def test_streaming_dominates_without_message_overhead():
    # pipelining can only lose through the per-message overhead, which is paid
    # once per chunk while the whole file pays it once
    rng = np.random.default_rng(77)
    for _ in range(300):
        params = LatencyParams(
            recording_duration=float(rng.uniform(0.01, 10)),
            chunk_duration=float(rng.uniform(0.05, 2.0)),
            upload_rate=float(rng.uniform(0.2, 5.0)),
            per_message_overhead=0.0,
            per_chunk_processing=float(rng.uniform(0, 0.5)),
            finalization=float(rng.uniform(0, 1.0)),
        )
        stream, whole = both(params)
        assert stream <= whole + 1e-9


@pytest.mark.parametrize("field", [
    "recording_duration", "per_message_overhead", "per_chunk_processing", "finalization",
])
def test_monotone_in_each_delay(field):
    rng = np.random.default_rng(hash(field) % 2**32)
    for _ in range(50):
        base = dict(
            recording_duration=float(rng.uniform(0.1, 6)),
            chunk_duration=float(rng.uniform(0.1, 1.0)),
            upload_rate=float(rng.uniform(0.3, 3.0)),
            per_message_overhead=float(rng.uniform(0, 0.3)),
            per_chunk_processing=float(rng.uniform(0, 0.3)),
            finalization=float(rng.uniform(0, 0.5)),
        )
        bumped = dict(base)
        bumped[field] = base[field] + float(rng.uniform(0.01, 1.0))
        for mode in Mode:
            assert simulate_latency(LatencyParams(**bumped), mode) >= \
                simulate_latency(LatencyParams(**base), mode) - 1e-12


def test_wall_clock_agrees_with_model():
    params = LatencyParams(
        recording_duration=0.6,
        chunk_duration=0.1,
        upload_rate=1.0,
        per_message_overhead=0.01,
        per_chunk_processing=0.02,
        finalization=0.05,
    )
    for mode in (Mode.STREAMING, Mode.WHOLE_FILE):
        predicted = simulate_latency(params, mode)
        measured = measure_latency(params, mode)
        assert measured == pytest.approx(predicted, rel=0.15), mode
