"""Why streaming beats uploading the whole file.

Sweeps the timing model over recording lengths and uplink speeds, then runs a
real client against a live mock server with artificial delays to show the
model matches the wall clock.
"""

from greeterbot.asr.latency import LatencyParams, Mode, measure_latency, simulate_latency

print("model sweep (chunk 0.5 s, finalization 0.5 s, per-chunk processing 0.05 s)")
print(f"{'T':>4} {'uplink':>7} {'whole':>7} {'stream':>7} {'saved':>6}")
for T in (2.0, 4.0, 8.0):
    for rate in (0.5, 1.0, 2.0):
        p = LatencyParams(T, 0.5, rate, 0.0, 0.05, 0.5)
        whole = simulate_latency(p, Mode.WHOLE_FILE)
        stream = simulate_latency(p, Mode.STREAMING)
        print(f"{T:4.0f} {rate:6.1f}x {whole:6.2f}s {stream:6.2f}s {whole - stream:5.2f}s")

print()
print("wall-clock check against a live mock server (0.6 s recording)")
params = LatencyParams(0.6, 0.1, 1.0, 0.01, 0.02, 0.05)
for mode in Mode:
    predicted = simulate_latency(params, mode)
    measured = measure_latency(params, mode)
    print(f"  {mode.value:<10} predicted {predicted:.3f}s  measured {measured:.3f}s")
