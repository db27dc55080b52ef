"""Command-line entry points."""

from __future__ import annotations

import argparse
import json
import math
import sys
import threading
import time

import numpy as np
import yaml

from greeterbot import assets
from greeterbot.core import Pose2D
from greeterbot.endpointer import EndpointConfig, endpoint_file, write_wav_mono


def _address(text: str) -> tuple[str, int]:
    host, _, port = text.rpartition(":")
    return (host or "127.0.0.1", int(port))


def _pose(text: str) -> Pose2D:
    x, y, theta = (float(v) for v in text.split(","))
    return Pose2D(x, y, theta)


# --------------------------------------------------------------- endpointer

def endpoint_main(argv=None) -> int:
    p = argparse.ArgumentParser(prog="endpoint",
                                description="Find where speech stops in a WAV file.")
    p.add_argument("--wav", required=True)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--max-duration", type=float, default=15.0)
    p.add_argument("--out", help="write the trimmed audio here (WAV)")
    args = p.parse_args(argv)

    config = EndpointConfig(epsilon=args.epsilon, max_duration=args.max_duration)
    stop, trimmed, rate = endpoint_file(args.wav, config)
    print(f"stop_time: {stop:.3f} s ({len(trimmed)} samples at {rate} Hz)")
    if args.out:
        write_wav_mono(args.out, trimmed, rate)
        print(f"trimmed audio written to {args.out}")
    return 0


# --------------------------------------------------------------------- asr

def asr_mock_main(argv=None) -> int:
    from greeterbot.asr.server import MockAsrServer, ServerDelays, load_fixtures

    p = argparse.ArgumentParser(prog="asr-mock",
                                description="Fixture-backed transcription server.")
    p.add_argument("--listen", type=_address, default=("127.0.0.1", 8301))
    p.add_argument("--fixtures", help="JSON file: hex sha256 digest -> transcript")
    p.add_argument("--delay-n", type=float, default=0.0, help="per-message delay, seconds")
    p.add_argument("--delay-p", type=float, default=0.0, help="per-chunk processing delay")
    p.add_argument("--delay-f", type=float, default=0.0, help="finalization delay")
    p.add_argument("--chunk-bytes", type=int, default=16000,
                   help="bytes per processing unit for --delay-p")
    args = p.parse_args(argv)

    fixtures = load_fixtures(args.fixtures) if args.fixtures else {}
    delays = ServerDelays(args.delay_n, args.delay_p, args.delay_f, args.chunk_bytes)
    server = MockAsrServer(args.listen, fixtures, delays)
    host, port = server.address
    print(f"asr-mock listening on {host}:{port} with {len(fixtures)} fixtures", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    return 0


def transcribe_main(argv=None) -> int:
    from greeterbot.asr.client import stream_transcribe, transcribe_whole
    from greeterbot.endpointer import read_wav_mono

    p = argparse.ArgumentParser(prog="transcribe",
                                description="Send a WAV file to a transcription server.")
    p.add_argument("--server", type=_address, required=True)
    p.add_argument("--wav", required=True)
    p.add_argument("--mode", choices=("stream", "whole"), default="stream")
    p.add_argument("--chunk-seconds", type=float, default=0.2)
    args = p.parse_args(argv)

    samples, rate = read_wav_mono(args.wav)
    payload = samples.astype("<i2").tobytes()
    if args.mode == "whole":
        transcript = transcribe_whole(payload, args.server)
    else:
        step = round(args.chunk_seconds * rate) * 2
        chunks = [payload[i:i + step] for i in range(0, len(payload), step)]
        transcript = stream_transcribe(chunks, args.server)
    print(json.dumps({"text": transcript.text,
                      "words": transcript.words, "final": transcript.final}))
    return 0


# -------------------------------------------------------------------- faces

def faces_serve_main(argv=None) -> int:
    from greeterbot.faces.gallery import Gallery
    from greeterbot.faces.service import FaceService

    p = argparse.ArgumentParser(prog="faces-serve",
                                description="Face enrollment and query service.")
    p.add_argument("--listen", type=_address, default=("127.0.0.1", 8302))
    p.add_argument("--gallery", required=True, help="JSON gallery file (created if absent)")
    args = p.parse_args(argv)

    service = FaceService(Gallery(path=args.gallery), args.listen)
    host, port = service.address
    print(f"faces-serve listening on {host}:{port}, gallery at {args.gallery}", flush=True)
    try:
        service.serve_forever()
    except KeyboardInterrupt:
        pass
    return 0


# ------------------------------------------------------------------ percept

def depth2scan_main(argv=None) -> int:
    from greeterbot.percept import ScanConfig, depth_to_scan, read_depth_fixture

    p = argparse.ArgumentParser(prog="depth2scan",
                                description="Convert a depth image fixture to a 2D scan.")
    p.add_argument("--depth", required=True, help="16-bit PGM, pixel value = millimeters")
    p.add_argument("--calib", required=True, help="JSON {fx,fy,cx,cy,height,pitch}")
    p.add_argument("--out", required=True, help="scan JSON output path")
    p.add_argument("--h-min", type=float, default=0.05)
    p.add_argument("--h-max", type=float, default=1.5)
    args = p.parse_args(argv)

    depth, intrinsics, mount = read_depth_fixture(args.depth, args.calib)
    cfg = ScanConfig(h_min=args.h_min, h_max=args.h_max)
    scan = depth_to_scan(depth, intrinsics, mount, cfg)
    with open(args.out, "w", encoding="utf-8") as f:
        json.dump(scan.to_dict(), f)
    returns = int(np.isfinite(scan.ranges).sum())
    print(f"wrote {args.out}: {returns}/{len(scan.ranges)} beams with returns")
    return 0


# ----------------------------------------------------------------- localize

def localize_main(argv=None) -> int:
    from greeterbot.core import LaserScan, normalize_angle
    from greeterbot.localize import MclConfig, MclFilter, OdomDelta
    from greeterbot.simworld.world import load_map

    p = argparse.ArgumentParser(prog="localize",
                                description="Run the particle filter over a sensor log.")
    p.add_argument("--map", required=True)
    p.add_argument("--log", required=True, help="JSONL of {odom_delta, scan} records")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--particles", type=int, default=500)
    p.add_argument("--init", type=_pose, help="x,y,theta when the log has no init record")
    args = p.parse_args(argv)

    grid = load_map(args.map)
    records = []
    init = args.init
    with open(args.log, encoding="utf-8") as f:
        for line in f:
            rec = json.loads(line)
            if "init" in rec:
                init = Pose2D(*rec["init"])
            else:
                records.append(rec)
    if init is None:
        p.error("no initial pose: pass --init or include an init record")

    filt = MclFilter(grid, init, seed=args.seed,
                     config=MclConfig(particles=args.particles))
    estimate, truth = init, None
    for i, rec in enumerate(records):
        delta = OdomDelta(*rec["odom_delta"])
        scan = LaserScan.from_dict(rec["scan"])
        estimate, _ = filt.step(delta, scan)
        truth = rec.get("truth")
        print(f"step {i + 1}: estimate ({estimate.x:.3f}, {estimate.y:.3f}, "
              f"{estimate.theta:.3f})")
    if truth is not None:
        err_xy = math.hypot(estimate.x - truth[0], estimate.y - truth[1])
        err_th = abs(normalize_angle(estimate.theta - truth[2]))
        print(f"final error vs truth: {err_xy:.3f} m, {math.degrees(err_th):.2f} deg")
    return 0


# --------------------------------------------------------------------- plan

def plan_main(argv=None) -> int:
    from greeterbot.navigate import ascii_render, inflate, plan
    from greeterbot.simworld.world import load_map

    p = argparse.ArgumentParser(prog="plan",
                                description="Plan a path on a map and print it.")
    p.add_argument("--map", required=True)
    p.add_argument("--start", type=_pose, required=True, help="x,y,theta")
    p.add_argument("--goal", type=_pose, required=True, help="x,y,theta")
    p.add_argument("--inflation", type=float, default=0.35)
    p.add_argument("--decay", type=float, default=5.0)
    p.add_argument("--penalty", type=float, default=5.0)
    args = p.parse_args(argv)

    costmap = inflate(load_map(args.map), args.inflation, args.decay)
    path = plan(costmap, args.start, args.goal, args.penalty)
    print(json.dumps({
        "total_cost": path.total_cost,
        "waypoints": [[w.x, w.y, w.theta] for w in path.waypoints],
    }))
    print(ascii_render(costmap, path, args.start, args.goal))
    return 0


# ---------------------------------------------------------------------- sim

def sim_main(argv=None) -> int:
    from greeterbot.core import VelocityCommand
    from greeterbot.localize import MotionNoise
    from greeterbot.simworld.world import World, ground_truth_scan, load_map

    p = argparse.ArgumentParser(
        prog="sim",
        description="Drive the simulated robot through a motion script and "
                    "write the sensor log that localize consumes.")
    p.add_argument("--map", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--script", required=True, help="motion script YAML")
    p.add_argument("--out", default="-", help="JSONL output path, '-' for stdout")
    args = p.parse_args(argv)

    with open(args.script, encoding="utf-8") as f:
        script = yaml.safe_load(f)
    grid = load_map(args.map)
    noise = MotionNoise(*script.get("noise", [0.01, 0.01, 0.02, 0.01]))
    scan_cfg = script.get("scan", {})
    beams = int(scan_cfg.get("beams", 120))
    fov = float(scan_cfg.get("fov", 2 * math.pi))
    range_max = float(scan_cfg.get("range_max", 8.0))
    increment = fov / beams
    init = script.get("init", [1.0, 1.0, 0.0])

    world = World(grid, Pose2D(*init), seed=args.seed, noise=noise)
    out = sys.stdout if args.out == "-" else open(args.out, "w", encoding="utf-8")
    try:
        out.write(json.dumps({"init": init, "map": args.map}) + "\n")
        for step in script.get("steps", []):
            cmd = VelocityCommand(*step.get("cmd", [0.0, 0.0, 0.0]))
            dt = float(step.get("dt", 0.1))
            for _ in range(int(step.get("repeat", 1))):
                delta = world.step(cmd, dt)
                scan = ground_truth_scan(grid, world.truth_pose, -fov / 2,
                                         -fov / 2 + (beams - 1) * increment,
                                         increment, 0.1, range_max)
                truth = world.truth_pose
                out.write(json.dumps({
                    "t": world.clock.now(),
                    "odom_delta": list(delta),
                    "scan": scan.to_dict(),
                    "truth": [truth.x, truth.y, truth.theta],
                }) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


# ------------------------------------------------------------------- bridge

def bridge_main(argv=None) -> int:
    from greeterbot.bridge import Bridge, BridgeServer
    from greeterbot.simworld.clock import WallClock

    p = argparse.ArgumentParser(prog="bridge", description="Tablet web bridge.")
    p.add_argument("--listen", type=_address, default=("127.0.0.1", 8303))
    args = p.parse_args(argv)

    bridge = Bridge(WallClock())
    server = BridgeServer(bridge, args.listen)
    host, port = server.address
    print(f"bridge listening on {host}:{port}", flush=True)

    def expiry_ticker():
        while True:
            time.sleep(0.2)
            bridge.check_expiry()

    threading.Thread(target=expiry_ticker, daemon=True).start()
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    return 0


# ------------------------------------------------------------------ greeter

def greeter_main(argv=None) -> int:
    from greeterbot.asr.server import MockAsrServer, load_fixtures
    from greeterbot.bridge import Bridge, BridgeServer
    from greeterbot.faces.service import FaceService
    from greeterbot.orchestrator.scenario import LocalAsr, Scenario, ScenarioRunner, WireAsr

    p = argparse.ArgumentParser(prog="greeter", description="Session orchestrator.")
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="replay a scenario headlessly")
    run.add_argument("--scenario", default=str(assets.scenario_path("demo.yaml")))
    run.add_argument("--map", help="override the scenario's map (yaml path)")
    run.add_argument("--gallery", help="gallery JSON path (persisted)")
    run.add_argument("--fixtures", help="extra transcript fixtures JSON")
    run.add_argument("--seed", type=int, help="override the scenario seed")
    run.add_argument("--asr", type=_address, help="also serve the mock ASR here (wire mode)")
    run.add_argument("--faces", type=_address, help="also serve the face service here")
    run.add_argument("--bridge", type=_address, help="also serve the bridge HTTP here")
    run.add_argument("--emit-log", help="write the event log as JSONL")
    args = p.parse_args(argv)

    scenario = Scenario.from_yaml(args.scenario)
    if args.seed is not None:
        scenario.seed = args.seed
    fixtures = load_fixtures(args.fixtures) if args.fixtures else {}

    asr = None
    asr_server = None
    if args.asr is not None:
        asr_server = MockAsrServer(args.asr, fixtures).start()
        asr = WireAsr(asr_server)
        print(f"asr-mock on {asr_server.address[0]}:{asr_server.address[1]}")

    runner = ScenarioRunner(
        scenario,
        gallery_path=args.gallery,
        fixtures=fixtures,
        asr=asr if asr is not None else LocalAsr(fixtures),
        map_path=args.map,
    )

    faces_server = bridge_server = None
    if args.faces is not None:
        faces_server = FaceService(runner.gallery, args.faces).start()
        print(f"faces on {faces_server.address[0]}:{faces_server.address[1]}")
    if args.bridge is not None:
        bridge_server = BridgeServer(runner.bridge, args.bridge).start()
        print(f"bridge on {bridge_server.address[0]}:{bridge_server.address[1]}")

    try:
        report = runner.run()
    finally:
        runner.close()
        for server in (asr_server, faces_server, bridge_server):
            if server is not None:
                server.stop()

    for r in report.results:
        mark = "PASS" if r.ok else "FAIL"
        detail = f" ({r.detail})" if r.detail else ""
        print(f"[{mark}] {r.step}: {json.dumps(r.expectation)}{detail}")
    summary = "all expectations passed" if report.passed else "FAILURES"
    print(f"{report.scenario}: {summary} "
          f"({sum(r.ok for r in report.results)}/{len(report.results)})")
    if args.emit_log:
        report.write_log(args.emit_log)
        print(f"event log written to {args.emit_log}")
    return 0 if report.passed else 1
