"""Load Balancer for LLM API keys.

Spreads backend calls over the configured keys. A key is skipped while it
has `max_concurrent_per_key` calls in flight or is cooling down after a
rate limit; callers waiting for a key are woken on every release.
"""

import asyncio
import time
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from src.config import settings

# Consecutive failures after which a key no longer counts as healthy
UNHEALTHY_STREAK = 5


class Release(str, Enum):
    """How the call made with a key ended."""

    OK = "ok"
    FAILED = "failed"
    RATE_LIMITED = "rate_limited"


@dataclass
class KeySlot:
    """Usage counters for one API key. Only `label` is safe to log."""

    label: str
    api_key: str
    in_flight: int = 0
    requests: int = 0
    failures: int = 0
    streak: int = 0
    cooldown_until: float = 0.0

    def cooling(self, now: float) -> bool:
        return self.cooldown_until > now


class LoadBalancer:
    """
    Hands out API keys to backend calls.

    The least loaded key wins; among equally loaded keys the one with the
    shorter failure streak, then fewer failures overall, then the earlier
    configured key.
    """

    def __init__(
        self,
        api_keys: list[str],
        max_concurrent_per_key: Optional[int] = None,
        rate_limit_cooldown: Optional[float] = None,
    ):
        self.slots = [KeySlot(label=f"key-{i + 1}", api_key=key) for i, key in enumerate(api_keys)]
        self._cap = max_concurrent_per_key or settings.max_concurrent_per_key
        self._cooldown = settings.rate_limit_cooldown if rate_limit_cooldown is None else rate_limit_cooldown
        self._changed = asyncio.Condition()

    @property
    def capacity(self) -> int:
        return len(self.slots) * self._cap

    @property
    def available(self) -> int:
        """Calls that could start right now."""
        now = time.monotonic()
        return sum(max(0, self._cap - s.in_flight) for s in self.slots if not s.cooling(now))

    @property
    def healthy(self) -> bool:
        now = time.monotonic()
        return any(not s.cooling(now) and s.streak < UNHEALTHY_STREAK for s in self.slots)

    def _pick(self, now: float) -> Optional[KeySlot]:
        ready = [s for s in self.slots if not s.cooling(now) and s.in_flight < self._cap]
        if not ready:
            return None
        return min(ready, key=lambda s: (s.in_flight, s.streak, s.failures))

    def _wait_time(self, now: float, remaining: float) -> float:
        # Wake up when the earliest cooldown ends even if nobody releases
        ends = [s.cooldown_until - now for s in self.slots if s.cooling(now)]
        return min([remaining, *ends])

    async def acquire(self, timeout: float = 60.0) -> Optional[KeySlot]:
        """
        Reserve a key for one call.

        Args:
            timeout: Seconds to wait for a usable key

        Returns:
            The reserved KeySlot, or None when the wait timed out
        """
        deadline = time.monotonic() + timeout
        async with self._changed:
            while True:
                now = time.monotonic()
                slot = self._pick(now)
                if slot is not None:
                    slot.in_flight += 1
                    slot.requests += 1
                    return slot

                remaining = deadline - now
                if remaining <= 0:
                    return None
                try:
                    await asyncio.wait_for(self._changed.wait(), timeout=self._wait_time(now, remaining))
                except asyncio.TimeoutError:
                    pass

    async def release(self, slot: KeySlot, outcome: Release = Release.OK) -> None:
        """Return a key; failures lengthen its streak, rate limits start a cooldown."""
        async with self._changed:
            slot.in_flight = max(0, slot.in_flight - 1)
            if outcome is Release.OK:
                slot.streak = 0
            else:
                slot.failures += 1
                slot.streak += 1
                if outcome is Release.RATE_LIMITED:
                    slot.cooldown_until = time.monotonic() + self._cooldown
            self._changed.notify_all()

    def snapshot(self) -> dict:
        """Usage summary for logs. Keys appear by label only."""
        now = time.monotonic()
        return {
            "keys": len(self.slots),
            "capacity": self.capacity,
            "available": self.available,
            "slots": [
                {
                    "label": s.label,
                    "in_flight": s.in_flight,
                    "requests": s.requests,
                    "failures": s.failures,
                    "cooling": s.cooling(now),
                    "cooldown_remaining": max(0.0, s.cooldown_until - now),
                }
                for s in self.slots
            ],
        }
