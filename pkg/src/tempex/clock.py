"""Real and virtual clocks, plus the politeness gate built on them.

All rate limiting in the toolkit goes through :class:`RateLimiter` so that
tests can swap in a :class:`VirtualClock` and assert inter-request gaps
without spending wall time.
"""

from __future__ import annotations

import random
import threading
import time
from dataclasses import dataclass


class RealClock:
    def now(self) -> float:
        return time.monotonic()

    def sleep(self, seconds: float) -> None:
        if seconds > 0:
            time.sleep(seconds)


class VirtualClock:
    """Monotonic clock whose sleep() just advances time.

    Thread-safe for the simple advance/read pattern the limiter uses.
    """

    def __init__(self, start: float = 0.0):
        self._t = start
        self._lock = threading.Lock()

    def now(self) -> float:
        with self._lock:
            return self._t

    def sleep(self, seconds: float) -> None:
        with self._lock:
            if seconds > 0:
                self._t += seconds


@dataclass(frozen=True)
class RateLimitPolicy:
    """Uniform random delay in [min_delay, max_delay] seconds between requests."""

    min_delay: float
    max_delay: float

    def __post_init__(self):
        if self.min_delay < 0 or self.min_delay > self.max_delay:
            raise ValueError(f"bad rate policy: min={self.min_delay} max={self.max_delay}")


# Defaults observed to keep archive endpoints happy: CDX paging and the
# per-capture provenance endpoint are throttled differently.
CDX_PAGE_POLICY = RateLimitPolicy(8.0, 11.0)
PROVENANCE_POLICY = RateLimitPolicy(15.0, 15.0)
NO_DELAY = RateLimitPolicy(0.0, 0.0)


class RateLimiter:
    """Serialized politeness gate for one endpoint.

    Each wait() draws a fresh delay from the policy and blocks until that
    much time has passed since the previous wait() returned. Concurrent
    callers queue on the internal lock.
    """

    def __init__(self, policy: RateLimitPolicy, clock=None, rng: random.Random | None = None):
        self.policy = policy
        self.clock = clock if clock is not None else RealClock()
        self.rng = rng if rng is not None else random.Random()
        self._lock = threading.Lock()
        self._last: float | None = None

    def wait(self) -> None:
        with self._lock:
            delay = self.rng.uniform(self.policy.min_delay, self.policy.max_delay)
            now = self.clock.now()
            if self._last is not None and delay > 0:
                due = self._last + delay
                if due > now:
                    self.clock.sleep(due - now)
            self._last = self.clock.now()

    def backoff(self, attempt: int) -> float:
        """Delay to apply before retry ``attempt`` (1-based): doubled each time."""
        base = max(self.policy.max_delay, 1.0)
        return base * (2 ** (attempt - 1))
