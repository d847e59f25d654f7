#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : Embeddable Local Page Cache                                                         #
# Version    : 0.1.0                                                                               #
# Python     : 3.10.12                                                                             #
# Filename   : /edgecache/cache/placement.py                                                       #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : Enter URL in Workspace Settings                                                     #
# ------------------------------------------------------------------------------------------------ #
# Created    : Wednesday October 7th 2026 03:35:05 pm                                              #
# Modified   : Tuesday October 13th 2026 06:41:47 pm                                               #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""In-memory cache state shared by the disk-backed cache and the trace simulator.

The engine owns the metadata index, the eviction policy, quota reservations and per-directory
accounting, and makes every placement and eviction decision. It performs no I/O: callers
delete the files of the pages it reports as evicted.
"""
from __future__ import annotations
from collections import Counter
from dataclasses import dataclass
import logging
import random
import threading
from typing import Optional, Sequence

from edgecache.cache.allocator import Allocator
from edgecache.eviction.policy import EvictionPolicy
from edgecache.exceptions import ImpossibleFitError, NoSpaceError
from edgecache.index.metadata import MetadataIndex, PageMetadata, Scope
from edgecache.quota.manager import QuotaManager, execute_eviction
from edgecache.store.page import PageId

# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)
# ------------------------------------------------------------------------------------------------ #
VICTIM_BATCH = 8


# ------------------------------------------------------------------------------------------------ #
@dataclass(frozen=True)
class Placement:
    page_id: PageId
    length: int
    scope: Scope
    dir: Optional[int]
    evicted: tuple[PageMetadata, ...] = ()
    rejection: Optional[str] = None

    @property
    def placed(self) -> bool:
        return self.dir is not None


# ------------------------------------------------------------------------------------------------ #
class PlacementEngine:
    """Decides where pages go and which pages leave.

    Args:
        capacities (Sequence[int]): Byte capacity per cache directory.
        policy (EvictionPolicy): Victim ordering.
        quota (QuotaManager): Scope capacities and in-flight reservations.
        seed (int): Seed for random cross-partition quota eviction.
    """

    def __init__(
        self,
        capacities: Sequence[int],
        policy: EvictionPolicy,
        quota: QuotaManager,
        seed: int = 0,
        index: Optional[MetadataIndex] = None,
    ) -> None:
        self._capacities = tuple(capacities)
        self._allocator = Allocator(self._capacities)
        self._policy = policy
        self._quota = quota
        self._index = index if index is not None else MetadataIndex()
        self._rng = random.Random(seed)
        self._reserved: Counter[int] = Counter()
        self._pending: Counter[tuple[PageId, int]] = Counter()
        self._lock = threading.RLock()

    @property
    def index(self) -> MetadataIndex:
        return self._index

    @property
    def policy(self) -> EvictionPolicy:
        return self._policy

    @property
    def quota(self) -> QuotaManager:
        return self._quota

    @property
    def allocator(self) -> Allocator:
        return self._allocator

    @property
    def capacities(self) -> tuple[int, ...]:
        return self._capacities

    def used(self, dir: int) -> int:
        """Bytes held or reserved on a directory."""
        return self._index.usage_by_dir(dir) + self._reserved.get(dir, 0)

    def holds(self, page_id: PageId, dir: int) -> bool:
        """True while the page is indexed on the directory or a write to it is in flight."""
        with self._lock:
            if self._pending.get((page_id, dir), 0) > 0:
                return True
            meta = self._index.get(page_id)
            return meta is not None and meta.dir == dir

    # -------------------------------------------------------------------------------------------- #
    def place(self, page_id: PageId, length: int, scope: Scope) -> Placement:
        """Makes room for a page under quota and directory capacity, and reserves it.

        A rejected placement still reports the pages evicted while trying.
        """
        evicted: list[PageMetadata] = []
        with self._lock:
            try:
                self._enforce_quota(scope, length, evicted)
                dir = self._allocator.allocate(
                    page_id, length, lambda d, n: self._make_room(d, n, evicted)
                )
            except (ImpossibleFitError, NoSpaceError) as e:
                return Placement(page_id, length, scope, None, tuple(evicted), rejection=str(e))
            self._quota.reserve(scope, length)
            self._reserved[dir] += length
            self._pending[(page_id, dir)] += 1
        return Placement(page_id, length, scope, dir, tuple(evicted))

    def allocate(self, page_id: PageId, length: int) -> tuple[int, list[PageMetadata]]:
        """Chooses a directory for the page, evicting within directories as needed.

        Raises:
            NoSpaceError: If no directory can take the page.
        """
        evicted: list[PageMetadata] = []
        with self._lock:
            dir = self._allocator.allocate(
                page_id, length, lambda d, n: self._make_room(d, n, evicted)
            )
        return dir, evicted

    def commit(
        self, placement: Placement, created_at: float, ttl: Optional[float] = None
    ) -> PageMetadata:
        """Registers a placed page once its bytes are stored.

        If a concurrent writer registered the same page first, that page is kept and returned.
        """
        meta = PageMetadata(
            page_id=placement.page_id,
            length=placement.length,
            scope=placement.scope,
            dir=placement.dir,
            created_at=created_at,
            last_access_at=created_at,
            ttl=ttl,
        )
        with self._lock:
            self._release(placement)
            existing = self._index.get(placement.page_id)
            if existing is not None:
                return existing
            self.register(meta)
        return meta

    def abort(self, placement: Placement) -> None:
        with self._lock:
            self._release(placement)

    def register(self, meta: PageMetadata) -> None:
        with self._lock:
            self._index.add(meta)
            self._policy.on_insert(meta.page_id, meta.expires_at)

    # -------------------------------------------------------------------------------------------- #
    def touch(self, page_id: PageId, now: float) -> None:
        with self._lock:
            self._policy.on_access(page_id)
            self._index.touch(page_id, now)

    def evict(self, page_id: PageId) -> Optional[PageMetadata]:
        """Removes a page from the index and the policy."""
        with self._lock:
            self._policy.on_remove(page_id)
            return self._index.remove(page_id)

    def evict_from_dir(self, dir: int, nbytes: int) -> list[PageMetadata]:
        """Evicts pages of one directory in policy order until nbytes are freed."""
        evicted: list[PageMetadata] = []
        with self._lock:
            self._evict_from_dir(dir, nbytes, evicted)
        return evicted

    def evict_all(self, pages: Sequence[PageMetadata]) -> list[PageMetadata]:
        with self._lock:
            return [m for m in (self.evict(p.page_id) for p in pages) if m is not None]

    def sweep_expired(self, now: float) -> list[PageMetadata]:
        with self._lock:
            expired = self._policy.ttl_sweep(now)
            return [m for m in (self._index.remove(p) for p in expired) if m is not None]

    # -------------------------------------------------------------------------------------------- #
    def _enforce_quota(self, scope: Scope, length: int, evicted: list[PageMetadata]) -> None:
        def collect(page_id: PageId) -> int:
            meta = self.evict(page_id)
            if meta is None:
                return 0
            evicted.append(meta)
            return meta.length

        while True:
            verdict = self._quota.check(scope, length, self._index.usage)
            if verdict.fits:
                return
            demand = verdict.demands[0]
            if execute_eviction(demand, self._index, self._policy, collect, self._rng) == 0:
                raise NoSpaceError(
                    f"Quota of scope '{demand.scope}' is held by writes in flight."
                )

    def _make_room(self, dir: int, length: int, evicted: list[PageMetadata]) -> bool:
        capacity = self._capacities[dir]
        if length > capacity:
            return False
        need = self.used(dir) + length - capacity
        if need > 0:
            self._evict_from_dir(dir, need, evicted)
        return self.used(dir) + length <= capacity

    def _evict_from_dir(self, dir: int, nbytes: int, evicted: list[PageMetadata]) -> None:
        def in_dir(page_id: PageId) -> bool:
            meta = self._index.get(page_id)
            return meta is not None and meta.dir == dir

        page_filter = None if len(self._capacities) == 1 else in_dir
        freed = 0
        while freed < nbytes:
            victims = self._policy.victims(VICTIM_BATCH, filter=page_filter)
            if not victims:
                break
            for page_id in victims:
                meta = self.evict(page_id)
                if meta is not None:
                    evicted.append(meta)
                    freed += meta.length
                if freed >= nbytes:
                    break
        if freed < nbytes:
            logger.debug(f"Directory {dir} freed {freed} of {nbytes} requested bytes.")

    def _release(self, placement: Placement) -> None:
        if placement.dir is None:
            return
        self._quota.release(placement.scope, placement.length)
        self._reserved[placement.dir] -= placement.length
        if self._reserved[placement.dir] <= 0:
            del self._reserved[placement.dir]
        slot = (placement.page_id, placement.dir)
        self._pending[slot] -= 1
        if self._pending[slot] <= 0:
            del self._pending[slot]
