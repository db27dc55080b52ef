"""Headless scenario replay.

A scenario is an ordered list of injections (hand touch, spoken utterance,
typed input, a face stepping in front of the camera, clock advances, new
obstacles) with expectations over the resulting event log. The runner owns a
simulated world, an in-process gallery and transcription table, the tablet
bridge, and the session state machine; everything runs on one simulated clock,
so a fixed seed replays bit-identically.
"""

from __future__ import annotations

import json
import queue
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path as FsPath

import numpy as np
import yaml

from greeterbot import assets
from greeterbot.asr.client import stream_transcribe
from greeterbot.asr.protocol import Transcript
from greeterbot.asr.server import MockAsrServer, fingerprint
from greeterbot.bridge import Bridge
from greeterbot.core import Pose2D, VelocityCommand
from greeterbot.endpointer import AudioChunk, Endpointer
from greeterbot.faces.detect import NoFaceError
from greeterbot.faces.gallery import Gallery
from greeterbot.navigate import check_collision
from greeterbot.orchestrator import personas, session as sm
from greeterbot.orchestrator.navloop import ARRIVED, NavConfig, navigation_loop
from greeterbot.orchestrator.session import SessionState, handle_event
from greeterbot.simworld import HAND_TOUCHED, HUG_PERFORMED, REFUSED, TTS_SAID, World
from greeterbot.simworld.clock import SimClock
from greeterbot.simworld.events import EventBus, SessionEvent
from greeterbot.simworld.world import load_map

CHUNK_SECONDS = 0.1


@dataclass
class Step:
    inject: dict = field(default_factory=dict)
    expect: list[dict] = field(default_factory=list)
    name: str = ""


@dataclass
class Scenario:
    name: str = "scenario"
    map: str = "office10"
    seed: int = 0
    start_pose: tuple[float, float, float] = (1.5, 1.5, 0.0)
    places: dict[str, tuple[float, float, float]] = field(default_factory=dict)
    preenroll: list[str] = field(default_factory=list)
    threshold: float = 0.8
    input_timeout: float = 30.0
    steps: list[Step] = field(default_factory=list)

    @classmethod
    def from_yaml(cls, path) -> "Scenario":
        with open(path, encoding="utf-8") as f:
            raw = yaml.safe_load(f)
        steps = [
            Step(inject=s.get("inject", {}), expect=s.get("expect", []),
                 name=s.get("name", f"step {i + 1}"))
            for i, s in enumerate(raw.get("steps", []))
        ]
        gallery = raw.get("gallery", {}) or {}
        return cls(
            name=raw.get("name", FsPath(path).stem),
            map=raw.get("map", "office10"),
            seed=int(raw.get("seed", 0)),
            start_pose=tuple(raw.get("start_pose", (1.5, 1.5, 0.0))),
            places={k: tuple(v) for k, v in (raw.get("places") or {}).items()},
            preenroll=list(gallery.get("preenroll", [])),
            threshold=float(raw.get("threshold", 0.8)),
            input_timeout=float(raw.get("input_timeout", 30.0)),
            steps=steps,
        )


@dataclass
class StepResult:
    step: str
    expectation: dict
    ok: bool
    detail: str = ""


@dataclass
class ScenarioReport:
    scenario: str
    results: list[StepResult]
    log: list[dict]

    @property
    def passed(self) -> bool:
        return all(r.ok for r in self.results)

    def write_log(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            for record in self.log:
                f.write(json.dumps(record, ensure_ascii=False) + "\n")


class LocalAsr:
    """In-process twin of the mock server: fingerprint table lookup."""

    def __init__(self, table: dict[str, str] | None = None):
        self.table = dict(table or {})

    def register(self, digest: str, text: str) -> None:
        self.table[digest] = text

    def transcribe(self, chunks: list[bytes]) -> Transcript:
        text = self.table.get(fingerprint(b"".join(chunks)))
        return Transcript("", [], True) if text is None else Transcript.from_text(text)


class WireAsr:
    """Streams chunks to a live mock server over the framed TCP protocol."""

    def __init__(self, server: MockAsrServer):
        self.server = server

    def register(self, digest: str, text: str) -> None:
        self.server.fixtures[digest] = text

    def transcribe(self, chunks: list[bytes]) -> Transcript:
        return stream_transcribe(chunks, self.server.address)


class ScenarioRunner:
    def __init__(self, scenario: Scenario, gallery_path=None,
                 fixtures: dict[str, str] | None = None,
                 asr: LocalAsr | WireAsr | None = None,
                 bridge: Bridge | None = None,
                 nav_config: NavConfig | None = None,
                 map_path=None):
        self.scenario = scenario
        self.clock = SimClock()
        self.bus = EventBus()
        self._bus_sub = self.bus.subscribe()

        grid = load_map(map_path if map_path is not None else self._resolve_map(scenario.map))
        self.world = World(grid, Pose2D(*scenario.start_pose), seed=scenario.seed,
                           clock=self.clock, bus=self.bus)
        self.bridge = bridge if bridge is not None else Bridge(self.clock)
        self.gallery = Gallery(path=gallery_path, clock=self.clock.now)
        for name in scenario.preenroll:
            self.gallery.enroll(personas.face_image(name), name)
        self.asr = asr if asr is not None else LocalAsr(fixtures)
        self.nav_config = nav_config if nav_config is not None else NavConfig()

        self.session = SessionState()
        self.log: list[dict] = []
        self._listening: Endpointer | None = None
        self.last_picture = None
        self._enroll_capture_pending = False
        self._input_inbox: queue.SimpleQueue = queue.SimpleQueue()
        self._input_thread: threading.Thread | None = None
        self._input_deadline: float | None = None

    @staticmethod
    def _resolve_map(name: str):
        bundled = assets.map_path(name)
        return bundled if bundled.exists() else name

    # ------------------------------------------------------------- logging

    def _drain_bus(self) -> None:
        for e in self._bus_sub.poll():
            self.log.append({"at": e.at, "kind": e.kind, **e.data})

    def _record(self, kind: str, **data) -> None:
        self.log.append({"at": self.clock.now(), "kind": kind, **data})

    # ------------------------------------------------------------ dispatch

    def dispatch(self, event: SessionEvent) -> None:
        pending = [event]
        while pending:
            ev = pending.pop(0)
            # identity results are already logged with full detail by the query
            if ev.kind in sm.INTERNAL_EVENT_KINDS and ev.kind != sm.EV_IDENTITY:
                self._record(ev.kind, **{k: v for k, v in ev.data.items()
                                         if isinstance(v, (str, int, float, bool, type(None)))})
            before = self.session.state
            self.session, actions = handle_event(self.session, ev)
            if self.session.state != before:
                self._record("StateChanged", frm=before, to=self.session.state)
            for action in actions:
                pending.extend(self._execute(action))
            self._drain_bus()

    def _event(self, kind: str, **data) -> SessionEvent:
        return SessionEvent(self.clock.now(), kind, data)

    def _execute(self, action: sm.Action) -> list[SessionEvent]:
        kind, data = action.kind, action.data
        if kind == sm.ACT_SAY:
            text = data["text"]
            self.bus.emit(self.clock.now(), TTS_SAID, text=text)
            self.bridge.show_caption(text)
            self._record("PageChanged", mode="caption", text=text)
            return []
        if kind == sm.ACT_START_LISTENING:
            self.world.set_led_blinking(True)
            self._listening = Endpointer()
            return []
        if kind == sm.ACT_STOP_LISTENING:
            self.world.set_led_blinking(False)
            return []
        if kind == sm.ACT_SHOW_PROCESSING:
            self.bridge.show_processing()
            self._record("PageChanged", mode="processing")
            return []
        if kind == sm.ACT_CLEAR_PAGE:
            self.bridge.clear()
            self._record("PageChanged", mode="blank")
            return []
        if kind == sm.ACT_CAPTURE:
            if data["purpose"] == "identify":
                self.last_picture = self.world.take_picture()
                self._drain_bus()
            else:
                self._enroll_capture_pending = True
            return []
        if kind == sm.ACT_QUERY_FACES:
            try:
                confidences = self.gallery.query(self.last_picture)
                label = self.gallery.decide(confidences, self.scenario.threshold)
                best = max(confidences.values()) if confidences else 0.0
            except NoFaceError:
                label, best = None, 0.0
            self._record("IdentityResolved", label=label,
                         trusted=label is not None, best_confidence=round(best, 4))
            return [self._event(sm.EV_IDENTITY, label=label)]
        if kind == sm.ACT_REQUEST_INPUT:
            self._start_input_request(data["prompt"])
            return []
        if kind == sm.ACT_ENROLL:
            try:
                entry_id = self.gallery.enroll(self.last_picture, data["label"])
                return [self._event(sm.EV_ENROLL_DONE, entry_id=entry_id)]
            except NoFaceError:
                return [self._event(sm.EV_ENROLL_FAILED, reason="no_face")]
        if kind == sm.ACT_NAV_GOTO:
            return [self._run_navigation(data["place"])]
        if kind == sm.ACT_MOVE:
            return [self._run_move(data["direction"])]
        if kind == sm.ACT_PERFORM_HUG:
            self.bus.emit(self.clock.now(), HUG_PERFORMED)
            return []
        if kind == sm.ACT_EMIT_REFUSED:
            self.bus.emit(self.clock.now(), REFUSED)
            return []
        if kind == sm.ACT_FINISH:
            return [self._event(sm.EV_DONE)]
        raise ValueError(f"unknown action {kind}")

    # ----------------------------------------------------- action helpers

    def _start_input_request(self, prompt: str) -> None:
        self._input_deadline = self.clock.now() + self.scenario.input_timeout

        def run():
            value = self.bridge.request_text_input(prompt, self.scenario.input_timeout)
            self._input_inbox.put(value)

        self._input_thread = threading.Thread(target=run, daemon=True)
        self._input_thread.start()
        # the thread must reach its listening state (and pin its deadline)
        # before any later step can advance the clock past it
        deadline = time.monotonic() + 5.0
        while not self.bridge.has_backchannel and time.monotonic() < deadline:
            time.sleep(0.002)

    def _finish_input_request(self, wall_timeout: float = 5.0) -> str | None:
        value = self._input_inbox.get(timeout=wall_timeout)
        self._input_thread.join(timeout=wall_timeout)
        self._input_thread = None
        self._input_deadline = None
        return value

    def _run_navigation(self, place: str) -> SessionEvent:
        target = self.scenario.places.get(place)
        if target is None:
            self._record("NavSummary", place=place, status="unknown_place")
            return self._event(sm.EV_NAV_DONE, arrived=False, reason="unknown place")
        result = navigation_loop(self.world, Pose2D(*target), self.nav_config,
                                 seed=self.scenario.seed)
        self._drain_bus()
        self._record("NavSummary", place=place, status=result.status,
                     cycles=result.cycles, replans=result.replans)
        self.last_nav_result = result
        return self._event(sm.EV_NAV_DONE, arrived=result.status == ARRIVED,
                           reason=result.reason)

    def _run_move(self, direction: str, duration: float = 1.0) -> SessionEvent:
        vel = {
            "forward": VelocityCommand(vx=0.3),
            "back": VelocityCommand(vx=-0.3),
            "left": VelocityCommand(vy=0.3),
            "right": VelocityCommand(vy=-0.3),
        }.get(direction, VelocityCommand(vx=0.3))
        steps = round(duration / 0.1)
        for _ in range(steps):
            scan = self.world.scan()
            if direction == "forward" and check_collision(
                    scan, vel, 0.1, self.nav_config.footprint_radius,
                    self.nav_config.controller.stop_distance):
                self._drain_bus()
                return self._event(sm.EV_NAV_DONE, arrived=False, reason="blocked")
            self.world.step(vel, 0.1)
        self._drain_bus()
        return self._event(sm.EV_NAV_DONE, arrived=True)

    # ---------------------------------------------------------- injections

    def inject(self, spec: dict) -> None:
        if "hand_touch" in spec:
            self.bus.emit(self.clock.now(), HAND_TOUCHED)
            self.dispatch(self._event(HAND_TOUCHED))
        elif "utterance" in spec:
            self._inject_utterance(spec["utterance"])
        elif "typed_input" in spec:
            self._inject_typed_input(spec["typed_input"])
        elif "face_capture" in spec:
            self._inject_face_capture(spec["face_capture"])
        elif "advance" in spec:
            self._inject_advance(float(spec["advance"]))
        elif "obstacle" in spec:
            x, y, w, h = spec["obstacle"]
            self.world.insert_obstacle(x, y, w, h)
            self._record("ObstacleInserted", x=x, y=y, w=w, h=h)
        elif spec:
            raise ValueError(f"unknown injection {sorted(spec)}")

    def _inject_utterance(self, spec: dict) -> None:
        text = spec["text"]
        face = spec.get("face")
        if face:
            self.world.camera_subject = personas.face_image(face)
        _, _, digest = personas.utterance_fixture(text)
        self.asr.register(digest, text)

        if self._listening is None:
            self._record("UtteranceIgnored", text=text)
            return

        samples = personas.utterance_samples(text)
        rate = personas.SAMPLE_RATE
        chunk = round(CHUNK_SECONDS * rate)
        sent: list[bytes] = []
        stop = None
        for i in range(0, len(samples), chunk):
            piece = samples[i:i + chunk]
            self.world.advance(len(piece) / rate)
            sent.append(AudioChunk(piece, rate).to_bytes())
            stop = self._listening.feed(AudioChunk(piece, rate))
            if stop is not None:
                break
        self._listening = None
        if stop is None:
            stop = len(samples) / rate
        self.dispatch(self._event(sm.EV_ENDPOINT_STOP, stop_time=stop))

        payload = AudioChunk(samples[: round(stop * rate)], rate).to_bytes()
        chunks = [payload[i:i + chunk * 2] for i in range(0, len(payload), chunk * 2)]
        transcript = self.asr.transcribe(chunks)
        self._record("Transcribed", text=transcript.text)
        self.dispatch(self._event(sm.EV_TRANSCRIPT, transcript=transcript))

    def _inject_typed_input(self, value: str) -> None:
        if self._input_thread is None:
            self._record("TypedInputIgnored", value=value)
            return
        deadline = time.monotonic() + 5.0
        while not self.bridge.has_backchannel and time.monotonic() < deadline:
            time.sleep(0.005)
        self.bridge.post_input(value)
        if not self.bridge.confirm():
            raise RuntimeError("bridge confirm failed: no back-channel listener")
        received = self._finish_input_request()
        if received is None:
            self.dispatch(self._event(sm.EV_TEXT_TIMEOUT))
        else:
            self.dispatch(self._event(sm.EV_TEXT_INPUT, value=received))

    def _inject_face_capture(self, name: str) -> None:
        self.world.camera_subject = personas.face_image(name)
        if self._enroll_capture_pending:
            self._enroll_capture_pending = False
            self.last_picture = self.world.take_picture()
            self._drain_bus()
            self.dispatch(self._event(sm.EV_PICTURE))
        else:
            self._record("FaceCaptureIgnored", name=name)

    def _inject_advance(self, dt: float) -> None:
        self.world.advance(dt)
        self.bridge.check_expiry()
        if (self._input_thread is not None and self._input_deadline is not None
                and self.clock.now() >= self._input_deadline):
            value = self._finish_input_request()
            if value is None:
                self.dispatch(self._event(sm.EV_TEXT_TIMEOUT))
            else:
                self.dispatch(self._event(sm.EV_TEXT_INPUT, value=value))
        self._drain_bus()

    def close(self) -> None:
        """Resolve a dangling input request so its thread can exit."""
        if self._input_thread is not None:
            if self._input_deadline is not None:
                now = self.clock.now()
                if now < self._input_deadline:
                    self.clock.advance(self._input_deadline - now)
            try:
                self._finish_input_request()
            except queue.Empty:
                self._input_thread = None

    # ----------------------------------------------------------------- run

    def run(self) -> ScenarioReport:
        results: list[StepResult] = []
        for step in self.scenario.steps:
            start = len(self.log)
            self.inject(step.inject)
            self._drain_bus()
            window = self.log[start:]
            for expectation in step.expect:
                ok, detail = self._check(expectation, window)
                results.append(StepResult(step.name, expectation, ok, detail))
        return ScenarioReport(self.scenario.name, results, self.log)

    def _check(self, expectation: dict, window: list[dict]) -> tuple[bool, str]:
        if "event" in expectation:
            kind = expectation["event"]
            ok = any(r["kind"] == kind for r in window)
            return ok, "" if ok else f"no {kind} in step window"
        if "no_event" in expectation:
            kind = expectation["no_event"]
            ok = not any(r["kind"] == kind for r in window)
            return ok, "" if ok else f"unexpected {kind}"
        if "tts_contains" in expectation:
            needle = expectation["tts_contains"].lower()
            ok = any(r["kind"] == TTS_SAID and needle in r.get("text", "").lower()
                     for r in window)
            return ok, "" if ok else f"no TtsSaid containing {needle!r}"
        if "state" in expectation:
            ok = self.session.state == expectation["state"]
            return ok, "" if ok else f"state is {self.session.state}"
        if "page_mode" in expectation:
            ok = self.bridge.page()["mode"] == expectation["page_mode"]
            return ok, "" if ok else f"page is {self.bridge.page()['mode']}"
        return False, f"unknown expectation {sorted(expectation)}"


def run_scenario_file(path, **kwargs) -> ScenarioReport:
    return ScenarioRunner(Scenario.from_yaml(path), **kwargs).run()
