#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : Embeddable Local Page Cache                                                         #
# Version    : 0.1.0                                                                               #
# Python     : 3.10.12                                                                             #
# Filename   : /edgecache/eviction/policy.py                                                       #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : Enter URL in Workspace Settings                                                     #
# ------------------------------------------------------------------------------------------------ #
# Created    : Saturday September 12th 2026 06:40:40 pm                                            #
# Modified   : Wednesday September 16th 2026 11:06:42 am                                           #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Victim selection policies and TTL expiry."""
from __future__ import annotations
from abc import ABC, abstractmethod
from collections import OrderedDict
from enum import Enum
import heapq
import itertools
import logging
import random
import threading
from typing import Callable, Optional

from edgecache.exceptions import ConfigurationError
from edgecache.store.page import PageId

# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)
# ------------------------------------------------------------------------------------------------ #
PageFilter = Callable[[PageId], bool]


# ------------------------------------------------------------------------------------------------ #
class EvictionPolicyName(str, Enum):
    LRU = "lru"
    FIFO = "fifo"
    RANDOM = "random"


# ------------------------------------------------------------------------------------------------ #
#                                       EVICTION POLICY                                            #
# ------------------------------------------------------------------------------------------------ #
class EvictionPolicy(ABC):
    """Tracks cached pages and nominates victims.

    Subclasses define ordering through `_insert`, `_access`, `_remove` and `_candidates`. TTL
    expiry is shared: pages inserted with an expiry time are kept on a heap and removed from
    tracking by `ttl_sweep`.
    """

    def __init__(self) -> None:
        self._lock = threading.RLock()
        self._expiry: list[tuple[float, int, PageId]] = []
        self._expires_at: dict[PageId, float] = {}
        self._sequence = itertools.count()
        self._logger = logging.getLogger(f"{self.__class__.__name__}")

    @property
    @abstractmethod
    def name(self) -> EvictionPolicyName:
        """Configuration name of the policy."""

    # -------------------------------------------------------------------------------------------- #
    def on_insert(self, page_id: PageId, expires_at: Optional[float] = None) -> None:
        with self._lock:
            self._insert(page_id)
            self._expires_at.pop(page_id, None)
            if expires_at is not None:
                self._expires_at[page_id] = expires_at
                heapq.heappush(self._expiry, (expires_at, next(self._sequence), page_id))

    def on_access(self, page_id: PageId) -> None:
        with self._lock:
            if page_id in self:
                self._access(page_id)

    def on_remove(self, page_id: PageId) -> None:
        with self._lock:
            self._remove(page_id)
            self._expires_at.pop(page_id, None)

    def victims(self, n: int, filter: Optional[PageFilter] = None) -> list[PageId]:
        """Returns up to n distinct tracked pages accepted by the filter, in eviction order.

        Victims stay tracked; callers report each removal through `on_remove`.
        """
        if n < 1:
            raise ValueError(f"Victim count must be at least 1, got {n}.")
        with self._lock:
            return self._select(n, filter)

    def ttl_sweep(self, now: float) -> list[PageId]:
        """Pages whose expiry time is at or before now, removed from tracking."""
        expired = []
        with self._lock:
            while self._expiry and self._expiry[0][0] <= now:
                expires_at, _, page_id = heapq.heappop(self._expiry)
                if self._expires_at.get(page_id) == expires_at:
                    expired.append(page_id)
                    self.on_remove(page_id)
        if expired:
            self._logger.debug(f"TTL sweep at {now} expired {len(expired)} pages.")
        return expired

    def tracked(self) -> list[PageId]:
        with self._lock:
            return list(self._pages())

    def __len__(self) -> int:
        return len(self._pages())

    def __contains__(self, page_id: object) -> bool:
        return page_id in self._pages()

    # -------------------------------------------------------------------------------------------- #
    @abstractmethod
    def _insert(self, page_id: PageId) -> None:
        """Begins tracking a page."""

    @abstractmethod
    def _access(self, page_id: PageId) -> None:
        """Records an access to a tracked page."""

    @abstractmethod
    def _remove(self, page_id: PageId) -> None:
        """Stops tracking a page. Absent pages are ignored."""

    @abstractmethod
    def _select(self, n: int, filter: Optional[PageFilter]) -> list[PageId]:
        """Victims in eviction order."""

    @abstractmethod
    def _pages(self) -> dict:
        """Tracked pages as a mapping keyed by page id."""


# ------------------------------------------------------------------------------------------------ #
class _OrderedPolicy(EvictionPolicy):
    def __init__(self) -> None:
        super().__init__()
        self._order: OrderedDict[PageId, None] = OrderedDict()

    def _insert(self, page_id: PageId) -> None:
        self._order.pop(page_id, None)
        self._order[page_id] = None

    def _remove(self, page_id: PageId) -> None:
        self._order.pop(page_id, None)

    def _select(self, n: int, filter: Optional[PageFilter]) -> list[PageId]:
        candidates = self._order if filter is None else (p for p in self._order if filter(p))
        return list(itertools.islice(candidates, n))

    def _pages(self) -> dict:
        return self._order


# ------------------------------------------------------------------------------------------------ #
class LRUPolicy(_OrderedPolicy):
    """Least recently accessed first; pages never accessed order by insertion."""

    @property
    def name(self) -> EvictionPolicyName:
        return EvictionPolicyName.LRU

    def _access(self, page_id: PageId) -> None:
        self._order.move_to_end(page_id)


# ------------------------------------------------------------------------------------------------ #
class FIFOPolicy(_OrderedPolicy):
    """Oldest insertion first; accesses are ignored."""

    @property
    def name(self) -> EvictionPolicyName:
        return EvictionPolicyName.FIFO

    def _access(self, page_id: PageId) -> None:
        pass


# ------------------------------------------------------------------------------------------------ #
class RandomPolicy(EvictionPolicy):
    """Uniform draws without replacement from the matching pages.

    Candidates are kept in a list in a deterministic order so that a fixed seed and a fixed
    operation sequence always produce the same victims.
    """

    def __init__(self, seed: int = 0) -> None:
        super().__init__()
        self._rng = random.Random(seed)
        self._slots: dict[PageId, int] = {}
        self._members: list[PageId] = []

    @property
    def name(self) -> EvictionPolicyName:
        return EvictionPolicyName.RANDOM

    def _insert(self, page_id: PageId) -> None:
        if page_id not in self._slots:
            self._slots[page_id] = len(self._members)
            self._members.append(page_id)

    def _access(self, page_id: PageId) -> None:
        pass

    def _remove(self, page_id: PageId) -> None:
        slot = self._slots.pop(page_id, None)
        if slot is None:
            return
        last = self._members.pop()
        if last != page_id:
            self._members[slot] = last
            self._slots[last] = slot

    def _select(self, n: int, filter: Optional[PageFilter]) -> list[PageId]:
        candidates = self._members if filter is None else [p for p in self._members if filter(p)]
        return self._rng.sample(candidates, min(n, len(candidates)))

    def _pages(self) -> dict:
        return self._slots


# ------------------------------------------------------------------------------------------------ #
def create_policy(name: str | EvictionPolicyName, seed: int = 0) -> EvictionPolicy:
    """Builds a policy from its configuration name: 'lru', 'fifo' or 'random'."""
    try:
        policy = EvictionPolicyName(str(getattr(name, "value", name)).lower())
    except ValueError as e:
        msg = f"Unknown eviction policy {name!r}. Expected one of lru, fifo, random."
        logger.error(msg)
        raise ConfigurationError(msg) from e
    if policy is EvictionPolicyName.LRU:
        return LRUPolicy()
    if policy is EvictionPolicyName.FIFO:
        return FIFOPolicy()
    return RandomPolicy(seed=seed)
