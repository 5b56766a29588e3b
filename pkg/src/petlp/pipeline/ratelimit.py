"""Sliding-window rate limiter for extraction clients.

The studied platform allows 100 queries per minute on its research tier,
so the defaults enforce exactly that. A sliding log (grant timestamps kept
for one window) enforces the per-minute quota exactly, which a token
bucket would not. Time is passed in, never read from the wall clock, so
schedules are simulable.
"""
from __future__ import annotations

import threading
from collections import deque
from dataclasses import dataclass


@dataclass(frozen=True)
class RateLimiterConfig:
    capacity_per_window: int = 100
    window_seconds: float = 60.0

    def __post_init__(self) -> None:
        if self.capacity_per_window < 1:
            raise ValueError("capacity must be at least 1")
        if self.window_seconds <= 0:
            raise ValueError("window must be positive")

    def to_dict(self) -> dict:
        return {"capacity_per_window": self.capacity_per_window, "window_seconds": self.window_seconds}


@dataclass(frozen=True)
class Permit:
    granted: bool
    retry_after: float = 0.0


def _ns(seconds: float) -> int:
    return round(seconds * 1e9)


class SlidingWindowLimiter:
    """Grants at most ``capacity`` permits in any window of ``window_seconds``.

    Grant timestamps older than one window are discarded; a grant at time t
    therefore counts against requests in (t, t + window] and a request at
    exactly t + window gets a fresh slot. Timestamps are quantised to whole
    nanoseconds so schedules expressed in float seconds behave exactly at
    that boundary. Acquisition is atomic under a lock so concurrent callers
    cannot both take the last slot.
    """

    def __init__(self, config: RateLimiterConfig | None = None):
        self.config = config or RateLimiterConfig()
        self._grants: deque[int] = deque()
        self._lock = threading.Lock()

    def acquire_permit(self, now: float) -> Permit:
        now_ns = _ns(now)
        window_ns = _ns(self.config.window_seconds)
        with self._lock:
            while self._grants and self._grants[0] <= now_ns - window_ns:
                self._grants.popleft()
            if len(self._grants) < self.config.capacity_per_window:
                self._grants.append(now_ns)
                return Permit(granted=True)
            retry_after = (self._grants[0] + window_ns - now_ns) / 1e9
            return Permit(granted=False, retry_after=retry_after)

    def grants_in_window(self, now: float) -> int:
        now_ns = _ns(now)
        window_ns = _ns(self.config.window_seconds)
        with self._lock:
            return sum(1 for t in self._grants if t > now_ns - window_ns)


def acquire_permit(limiter_state: SlidingWindowLimiter, now: float) -> Permit:
    """Functional entry point over a shared limiter."""
    return limiter_state.acquire_permit(now)
