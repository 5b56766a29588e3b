"""Sliding-window limiter under simulated schedules."""
import threading

import numpy as np
import pytest

from petlp.pipeline import Permit, RateLimiterConfig, SlidingWindowLimiter, acquire_permit


def window_counts_ok(grant_times, capacity, window):
    """Oracle: no window [t, t + window) anchored at a grant holds more than
    capacity grants."""
    times = sorted(grant_times)
    j = 0
    for i, start in enumerate(times):
        while j < len(times) and times[j] < start + window:
            j += 1
        if j - i > capacity:
            return False
    return True


def test_config_validation():
    with pytest.raises(ValueError):
        RateLimiterConfig(capacity_per_window=0)
    with pytest.raises(ValueError):
        RateLimiterConfig(window_seconds=0)


def test_101st_request_within_window_is_denied():
    limiter = SlidingWindowLimiter(RateLimiterConfig())
    for i in range(100):
        assert limiter.acquire_permit(i * 0.5).granted
    denied = limiter.acquire_permit(59.0)
    assert not denied.granted
    assert denied.retry_after > 0


def test_grant_returns_after_first_expires():
    limiter = SlidingWindowLimiter(RateLimiterConfig())
    for i in range(100):
        limiter.acquire_permit(float(i) * 0.1)  # all within 10 s
    assert not limiter.acquire_permit(59.9).granted
    assert limiter.acquire_permit(61.0).granted  # first grant (t=0) expired


def test_capacity_one_mutual_exclusion():
    limiter = SlidingWindowLimiter(RateLimiterConfig(capacity_per_window=1))
    first = limiter.acquire_permit(10.0)
    second = limiter.acquire_permit(10.0)
    assert first.granted and not second.granted
    assert second.retry_after == pytest.approx(60.0)


def test_exact_rate_schedule_never_denied():
    limiter = SlidingWindowLimiter(RateLimiterConfig())
    spacing = 60.0 / 100
    for i in range(1000):
        assert limiter.acquire_permit(i * spacing).granted, f"request {i}"


def test_functional_entry_point():
    limiter = SlidingWindowLimiter()
    assert acquire_permit(limiter, 0.0) == Permit(granted=True)


def test_retry_after_is_exactly_until_oldest_expiry():
    limiter = SlidingWindowLimiter(RateLimiterConfig(capacity_per_window=2, window_seconds=10.0))
    limiter.acquire_permit(1.0)
    limiter.acquire_permit(2.0)
    denied = limiter.acquire_permit(3.0)
    assert denied.retry_after == pytest.approx(8.0)
    assert limiter.acquire_permit(3.0 + denied.retry_after).granted


def test_randomised_schedules_never_exceed_capacity():
    """Dense random schedules: the oracle never finds an over-full window."""
    rng = np.random.default_rng(7)
    for _ in range(200):
        limiter = SlidingWindowLimiter(RateLimiterConfig())
        n = int(rng.integers(50, 400))
        times = np.sort(rng.uniform(0.0, rng.uniform(30.0, 240.0), size=n))
        granted = [t for t in times if limiter.acquire_permit(float(t)).granted]
        assert window_counts_ok(granted, 100, 60.0)


def test_concurrent_acquisition_is_atomic():
    limiter = SlidingWindowLimiter(RateLimiterConfig(capacity_per_window=50))
    results = []

    def worker():
        for _ in range(20):
            results.append(limiter.acquire_permit(0.0).granted)

    threads = [threading.Thread(target=worker) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert sum(results) == 50  # exactly capacity granted at one instant
