"""Tablet page state and the typed-input back-channel.

The tablet mirrors the robot's voice: captions stay up until a newer utterance
or 10 seconds pass; a fixed page covers the gap while audio is processed; an
input page collects typed text that is returned to the session over a TCP
back-channel, one JSON line per confirmation.
"""

from __future__ import annotations

import json
import queue
import socket
import threading
from dataclasses import dataclass

from greeterbot.simworld.clock import SimClock

PROCESSING_TEXT = "Processing audio input"
CAPTION_SECONDS = 10.0

MODE_CAPTION = "caption"
MODE_PROCESSING = "processing"
MODE_INPUT = "input"
MODE_BLANK = "blank"


@dataclass(frozen=True)
class TabletPage:
    mode: str
    text: str = ""
    prompt: str = ""
    shown_at: float = 0.0

    def to_dict(self) -> dict:
        if self.mode == MODE_CAPTION:
            return {"mode": self.mode, "text": self.text, "shown_at": self.shown_at}
        if self.mode == MODE_PROCESSING:
            return {"mode": self.mode, "text": PROCESSING_TEXT}
        if self.mode == MODE_INPUT:
            return {"mode": self.mode, "prompt": self.prompt}
        return {"mode": MODE_BLANK}


BLANK = TabletPage(MODE_BLANK)


@dataclass(frozen=True)
class BackchannelMessage:
    value: str
    at: float
    type: str = "text_input"

    def to_line(self) -> bytes:
        return (json.dumps({"type": self.type, "value": self.value, "at": self.at},
                           ensure_ascii=False) + "\n").encode("utf-8")

    @classmethod
    def from_line(cls, line: bytes) -> "BackchannelMessage":
        d = json.loads(line.decode("utf-8"))
        return cls(d["value"], d["at"], d["type"])


class Bridge:
    """Single-writer page state read by many UI clients.

    The session replaces the page; every replacement (and every caption
    expiry) is pushed to all subscribed clients. Caption expiry runs on the
    bridge's clock, so simulated sessions get exact timing.
    """

    def __init__(self, clock=None):
        self.clock = clock if clock is not None else SimClock()
        self._lock = threading.Lock()
        self._page = BLANK
        self._subscribers: list[queue.SimpleQueue] = []
        self._pending_input = ""
        self._backchannel: tuple[str, int] | None = None
        self._send_lock = threading.Lock()
        self.sent_messages = 0

    # -- page state ------------------------------------------------------

    def _replace(self, page: TabletPage) -> None:
        with self._lock:
            self._page = page
            subs = list(self._subscribers)
        payload = page.to_dict()
        for q in subs:
            q.put(payload)

    def show_caption(self, text: str) -> None:
        self._replace(TabletPage(MODE_CAPTION, text=text, shown_at=self.clock.now()))

    def show_processing(self) -> None:
        self._replace(TabletPage(MODE_PROCESSING))

    def show_input(self, prompt: str) -> None:
        self._replace(TabletPage(MODE_INPUT, prompt=prompt))

    def clear(self) -> None:
        self._replace(BLANK)

    def check_expiry(self) -> None:
        """Blank an expired caption; call after the clock moves."""
        with self._lock:
            page = self._page
        if page.mode == MODE_CAPTION and self.clock.now() - page.shown_at >= CAPTION_SECONDS:
            self._replace(BLANK)

    def page(self) -> dict:
        self.check_expiry()
        with self._lock:
            return self._page.to_dict()

    def subscribe(self) -> queue.SimpleQueue:
        q: queue.SimpleQueue = queue.SimpleQueue()
        with self._lock:
            self._subscribers.append(q)
        return q

    def unsubscribe(self, q) -> None:
        with self._lock:
            if q in self._subscribers:
                self._subscribers.remove(q)

    # -- typed input -------------------------------------------------------

    def set_backchannel(self, port: int, host: str = "127.0.0.1") -> None:
        with self._lock:
            self._backchannel = (host, port)

    def clear_backchannel(self) -> None:
        with self._lock:
            self._backchannel = None

    @property
    def has_backchannel(self) -> bool:
        with self._lock:
            return self._backchannel is not None

    def post_input(self, value: str) -> None:
        with self._lock:
            self._pending_input = value

    def confirm(self) -> bool:
        """Send exactly one back-channel message carrying the pending input.
        Sends serialize, so N confirmations produce N messages in order."""
        with self._lock:
            target = self._backchannel
            value = self._pending_input
        if target is None:
            return False
        message = BackchannelMessage(value, self.clock.now())
        with self._send_lock:
            with socket.create_connection(target, timeout=5) as sock:
                sock.sendall(message.to_line())
            self.sent_messages += 1
        return True

    def request_text_input(self, prompt: str, timeout: float = 30.0) -> str | None:
        """Serve the input page, listen for one back-channel line, restore the
        page. None on timeout (measured on the bridge clock)."""
        with self._lock:
            previous = self._page
        self.show_input(prompt)

        listener = socket.socket()
        listener.bind(("127.0.0.1", 0))
        listener.listen(1)
        listener.settimeout(0.05)
        self.set_backchannel(listener.getsockname()[1])

        received: list[str] = []
        stop = threading.Event()

        def accept_one():
            while not stop.is_set():
                try:
                    conn, _ = listener.accept()
                except socket.timeout:
                    continue
                except OSError:
                    return
                with conn:
                    line = conn.makefile("rb").readline()
                if line:
                    received.append(BackchannelMessage.from_line(line).value)
                return

        worker = threading.Thread(target=accept_one, daemon=True)
        worker.start()
        try:
            self.clock.wait_until(self.clock.now() + timeout, predicate=lambda: bool(received))
        finally:
            stop.set()
            worker.join(timeout=2)
            listener.close()
            self.clear_backchannel()
            self._replace(previous)
        return received[0] if received else None
