"""Clocks. Simulated time makes timeout and expiry behavior exact in tests;
wall time exists for interactive use."""

from __future__ import annotations

import threading
import time


class SimClock:
    """Manually advanced clock. wait_until() blocks a real thread until the
    simulated deadline passes or the predicate turns true, which lets server
    threads wait on simulated time."""

    def __init__(self, start: float = 0.0):
        self._now = start
        self._cond = threading.Condition()

    def now(self) -> float:
        with self._cond:
            return self._now

    def advance(self, dt: float) -> float:
        if dt < 0:
            raise ValueError("the clock cannot go backwards")
        with self._cond:
            self._now += dt
            self._cond.notify_all()
            return self._now

    def wait_until(self, deadline: float, predicate=None, poll: float = 0.05) -> bool:
        """True when predicate() fired, False when the deadline passed first.
        With no predicate, returns False at the deadline."""
        with self._cond:
            while True:
                if predicate is not None and predicate():
                    return True
                if self._now >= deadline:
                    return False
                # wall-clock poll keeps external predicates (sockets) live even
                # when nobody advances the simulated clock
                self._cond.wait(timeout=poll)

    def __call__(self) -> float:
        return self.now()


class WallClock:
    """time.monotonic with the same interface."""

    def __init__(self):
        self._t0 = time.monotonic()

    def now(self) -> float:
        return time.monotonic() - self._t0

    def advance(self, dt: float) -> float:
        time.sleep(dt)
        return self.now()

    def wait_until(self, deadline: float, predicate=None, poll: float = 0.02) -> bool:
        while True:
            if predicate is not None and predicate():
                return True
            remaining = deadline - self.now()
            if remaining <= 0:
                return False
            time.sleep(min(poll, remaining))

    def __call__(self) -> float:
        return self.now()
