#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : Embeddable Local Page Cache                                                         #
# Version    : 0.1.0                                                                               #
# Python     : 3.10.12                                                                             #
# Filename   : /edgecache/admission/ratelimit.py                                                   #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : Enter URL in Workspace Settings                                                     #
# ------------------------------------------------------------------------------------------------ #
# Created    : Sunday September 13th 2026 10:39:33 am                                              #
# Modified   : Friday September 18th 2026 11:37:19 am                                              #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Minute-bucketed access counting for frequency-based admission."""
from __future__ import annotations
from collections import Counter, deque
import logging
import threading
from typing import Hashable

# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)
# ------------------------------------------------------------------------------------------------ #
DEFAULT_WINDOW_MINUTES = 10
DEFAULT_THRESHOLD = 15


# ------------------------------------------------------------------------------------------------ #
def minute_of(now: float) -> int:
    """Wall-clock minute holding the timestamp (seconds)."""
    return int(now // 60)


# ------------------------------------------------------------------------------------------------ #
class BucketTimeRateLimit:
    """Admits a key once it was accessed more than `threshold` times in the last
    `window_minutes` minute buckets.

    A bucket stamped m is live at time t iff m > minute(t) - window_minutes. Buckets that fall
    out of the window are discarded when the next access is recorded, so at most
    `window_minutes` buckets are held and keys with no live accesses take no memory.
    """

    def __init__(
        self, window_minutes: int = DEFAULT_WINDOW_MINUTES, threshold: int = DEFAULT_THRESHOLD
    ) -> None:
        if window_minutes < 1:
            raise ValueError(f"window_minutes must be positive, got {window_minutes}.")
        if threshold < 1:
            raise ValueError(f"threshold must be positive, got {threshold}.")
        self._window = window_minutes
        self._threshold = threshold
        self._buckets: deque[tuple[int, Counter]] = deque()
        self._lock = threading.Lock()

    @property
    def window_minutes(self) -> int:
        return self._window

    @property
    def threshold(self) -> int:
        return self._threshold

    @property
    def buckets(self) -> list[tuple[int, dict]]:
        with self._lock:
            return [(minute, dict(counts)) for minute, counts in self._buckets]

    # -------------------------------------------------------------------------------------------- #
    def record_access(self, key: Hashable, now: float) -> None:
        """Counts one access of key in the bucket of minute(now)."""
        minute = minute_of(now)
        with self._lock:
            if self._buckets and minute < self._buckets[-1][0]:
                # Late arrivals are folded into the newest bucket.
                minute = self._buckets[-1][0]
            while self._buckets and self._buckets[0][0] <= minute - self._window:
                self._buckets.popleft()
            if not self._buckets or self._buckets[-1][0] != minute:
                self._buckets.append((minute, Counter()))
            self._buckets[-1][1][key] += 1

    def total(self, key: Hashable, now: float) -> int:
        """Accesses of key over the buckets live at now."""
        oldest_live = minute_of(now) - self._window
        with self._lock:
            return sum(counts[key] for minute, counts in self._buckets if minute > oldest_live)

    def should_admit(self, key: Hashable, now: float) -> bool:
        """True iff the live access count of key exceeds the threshold. Does not mutate state."""
        return self.total(key, now) > self._threshold

    def clear(self) -> None:
        with self._lock:
            self._buckets.clear()

    def __repr__(self) -> str:
        return (
            f"{self.__class__.__name__}(window_minutes={self._window}, "
            f"threshold={self._threshold}, buckets={len(self._buckets)})"
        )
