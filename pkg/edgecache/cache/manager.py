#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : Embeddable Local Page Cache                                                         #
# Version    : 0.1.0                                                                               #
# Python     : 3.10.12                                                                             #
# Filename   : /edgecache/cache/manager.py                                                         #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : Enter URL in Workspace Settings                                                     #
# ------------------------------------------------------------------------------------------------ #
# Created    : Sunday October 4th 2026 02:58:46 pm                                                 #
# Modified   : Friday October 9th 2026 05:48:36 pm                                                 #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Read-through page cache over one or more local directories.

A read is split into page operations. Hits are served from the page store; misses fetch the
whole page from the backing store, store it when admission, quota and capacity allow, and
serve the requested slice. Local faults never reach the caller: timeouts and corrupted pages
are served from the backing store and a full disk triggers early eviction.
"""
from __future__ import annotations
from abc import ABC, abstractmethod
from collections import Counter
from concurrent.futures import Future, ThreadPoolExecutor
import concurrent.futures
from dataclasses import dataclass
from enum import Enum
import logging
import math
import threading
import time
from typing import Callable, Iterable, Optional, Sequence

import pandas as pd

from edgecache.admission.controller import AdmissionController, AdmissionDecision
from edgecache.cache.config import CacheConfig
from edgecache.cache.placement import Placement, PlacementEngine
from edgecache.data.dataclass import DataClass
from edgecache.eviction.policy import EvictionPolicy, create_policy
from edgecache.exceptions import (
    BackingUnavailableError,
    CorruptedPageError,
    DiskFullError,
    DuplicatePageError,
    InvalidRangeError,
    PageNotFoundError,
    PageReadTimeoutError,
)
from edgecache.index.metadata import MetadataIndex, PageMetadata, Scope
from edgecache.metrics.registry import ErrorClass, MetricEvent, MetricKind, MetricsRegistry, Op
from edgecache.quota.manager import QuotaManager
from edgecache.store.page import PageId, PageStore, file_id_for

# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)


# ------------------------------------------------------------------------------------------------ #
class CacheOutcome(str, Enum):
    HIT = "hit"
    MISS_CACHED = "miss_cached"
    MISS_BYPASSED = "miss_bypassed"
    FALLBACK = "fallback"


# Outcome of a multi-page request is its most severe page outcome.
OUTCOME_SEVERITY = {
    CacheOutcome.HIT: 0,
    CacheOutcome.MISS_CACHED: 1,
    CacheOutcome.MISS_BYPASSED: 2,
    CacheOutcome.FALLBACK: 3,
}


def combine_outcomes(outcomes: Iterable[CacheOutcome]) -> CacheOutcome:
    return max(outcomes, key=OUTCOME_SEVERITY.__getitem__, default=CacheOutcome.HIT)


def pages_spanned(offset: int, length: int, page_size: int) -> range:
    """Indices of the pages touched by [offset, offset + length)."""
    return range(offset // page_size, (offset + length - 1) // page_size + 1)


class FaultKind(str, Enum):
    CORRUPTED = "Corrupted"
    DISK_FULL = "DiskFull"
    TIMEOUT = "Timeout"


class FaultAction(str, Enum):
    EVICTED = "evicted"
    EARLY_EVICTION = "early_eviction"
    SERVED_REMOTE = "served_remote"


_FAULT_ERROR_CLASS = {
    FaultKind.CORRUPTED: ErrorClass.CORRUPTED,
    FaultKind.DISK_FULL: ErrorClass.DISK_FULL,
    FaultKind.TIMEOUT: ErrorClass.TIMEOUT,
}
_OUTCOME_KIND = {
    CacheOutcome.HIT: MetricKind.HIT,
    CacheOutcome.MISS_CACHED: MetricKind.MISS_CACHED,
    CacheOutcome.MISS_BYPASSED: MetricKind.MISS_BYPASSED,
    CacheOutcome.FALLBACK: MetricKind.FALLBACK,
}


# ------------------------------------------------------------------------------------------------ #
@dataclass(frozen=True, repr=False)
class ReadResult(DataClass):
    data: bytes
    outcome: CacheOutcome
    pages: int = 1

    def __iter__(self):
        yield self.data
        yield self.outcome


# ------------------------------------------------------------------------------------------------ #
#                                        BACKING STORE                                             #
# ------------------------------------------------------------------------------------------------ #
class BackingStore(ABC):
    """Remote source of file bytes. Content is immutable for a fixed (file, version)."""

    @abstractmethod
    def read(self, file_id: str, offset: int, length: int) -> bytes:
        """Bytes [offset, offset + length) of the file, shorter at end of file."""

    @abstractmethod
    def file_version(self, file_id: str) -> object:
        """Version token of the file, e.g. its modification time."""

    def file_length(self, file_id: str) -> Optional[int]:
        """File size in bytes if the store knows it cheaply."""
        return None


# ------------------------------------------------------------------------------------------------ #
#                                        CACHE MANAGER                                             #
# ------------------------------------------------------------------------------------------------ #
class CacheManager:
    """Embeddable local page cache.

    Args:
        config (CacheConfig): Cache settings.
        backing (BackingStore): Source of truth for file bytes.
        metrics (MetricsRegistry): Receives cache events. A private registry when omitted.
        clock (Callable): Seconds since the epoch. Governs TTLs and admission windows.
        stores (Sequence[PageStore]): One store per configured directory. Built from the config
            when omitted.
    """

    def __init__(
        self,
        config: CacheConfig,
        backing: BackingStore,
        metrics: Optional[MetricsRegistry] = None,
        clock: Callable[[], float] = time.time,
        stores: Optional[Sequence[PageStore]] = None,
    ) -> None:
        self._config = config
        self._backing = backing
        self._metrics = metrics if metrics is not None else MetricsRegistry()
        self._clock = clock
        self._stores = list(stores) if stores is not None else [
            PageStore(layout, dir_id=i, checksums=config.checksums)
            for i, layout in enumerate(config.layouts)
        ]
        if len(self._stores) != len(config.dirs):
            raise ValueError(f"Expected {len(config.dirs)} page stores, got {len(self._stores)}.")
        self._engine = PlacementEngine(
            capacities=config.capacities,
            policy=create_policy(config.eviction_policy, seed=config.seed),
            quota=QuotaManager(config.quotas),
            seed=config.seed,
        )
        self._admission = AdmissionController.from_config(config.admission)
        self._versions: dict[str, tuple[object, str]] = {}
        self._versions_lock = threading.Lock()
        self._inflight: dict[PageId, Future] = {}
        self._inflight_lock = threading.Lock()
        self._timeouts: Counter[PageId] = Counter()
        self._timeouts_lock = threading.Lock()
        self._remote = ThreadPoolExecutor(max_workers=16, thread_name_prefix="edgecache-remote")
        self._sweeper: Optional[threading.Thread] = None
        self._stopped = threading.Event()
        self._logger = logging.getLogger(f"{self.__class__.__name__}")
        self._restore()

    # -------------------------------------------------------------------------------------------- #
    @property
    def config(self) -> CacheConfig:
        return self._config

    @property
    def index(self) -> MetadataIndex:
        return self._engine.index

    @property
    def policy(self) -> EvictionPolicy:
        return self._engine.policy

    @property
    def metrics(self) -> MetricsRegistry:
        return self._metrics

    @property
    def stores(self) -> list[PageStore]:
        return list(self._stores)

    def cache_id(self, file_id: str) -> str:
        """Cache file id of the current version of a backing file."""
        with self._versions_lock:
            known = self._versions.get(file_id)
            if known is None:
                version = self._backing.file_version(file_id)
                known = (version, file_id_for(file_id, version))
                self._versions[file_id] = known
            return known[1]

    # -------------------------------------------------------------------------------------------- #
    #                                         READ                                                 #
    # -------------------------------------------------------------------------------------------- #
    def read(
        self,
        file_id: str,
        offset: int,
        length: int,
        scope: Optional[Scope] = None,
        run_id: Optional[str] = None,
    ) -> ReadResult:
        """Reads [offset, offset + length) of a backing file through the cache.

        Raises:
            InvalidRangeError: If the range is empty, negative or past the end of the file.
            BackingUnavailableError: If a required backing-store read failed or timed out.
        """
        if offset < 0 or length < 1:
            msg = f"Invalid range offset={offset}, length={length} for {file_id}."
            self._logger.error(msg)
            raise InvalidRangeError(msg)
        file_length = self._backing.file_length(file_id)
        if file_length is not None and offset + length > file_length:
            msg = f"Range [{offset}, {offset + length}) exceeds {file_id} length {file_length}."
            self._logger.error(msg)
            raise InvalidRangeError(msg)

        scope = scope if scope is not None else Scope.global_()
        request = _Request(self, file_id, self.cache_id(file_id), scope, run_id, self._clock())
        page_size = self._config.page_size_bytes
        chunks, outcomes = [], []
        for index in pages_spanned(offset, length, page_size):
            start = index * page_size
            lo = max(offset, start) - start
            hi = min(offset + length, start + page_size) - start
            data, outcome = self._read_page(request, PageId(request.cache_id, index), lo, hi - lo)
            chunks.append(data)
            outcomes.append(outcome)

        outcome = combine_outcomes(outcomes)
        self._record(_OUTCOME_KIND[outcome], scope=scope, nbytes=length, run_id=run_id)
        return ReadResult(data=b"".join(chunks), outcome=outcome, pages=len(outcomes))

    def _read_page(
        self, request: _Request, page_id: PageId, lo: int, n: int
    ) -> tuple[bytes, CacheOutcome]:
        meta = self.index.get(page_id)
        if meta is not None:
            store = self._stores[meta.dir]
            try:
                data = store.read_page(
                    page_id, lo, n, expected_length=meta.length, timeout=self._config.read_timeout_s
                )
            except CorruptedPageError:
                self.on_fault(page_id, FaultKind.CORRUPTED)
            except PageReadTimeoutError:
                self.on_fault(page_id, FaultKind.TIMEOUT)
            except PageNotFoundError:
                # Evicted after the lookup, or removed from disk behind the cache.
                if self._engine.evict(page_id) is not None:
                    self._record_error(ErrorClass.IO, meta.scope)
            except OSError:
                self._logger.exception(f"Local read of page {page_id} failed.")
                self._record_error(ErrorClass.IO, meta.scope)
                self._delete_pages(self._engine.evict_all([meta]))
            else:
                self._clear_timeouts(page_id)
                self._engine.touch(page_id, request.now)
                return data, CacheOutcome.HIT
            return self._fetch_range(request, page_id, lo, n), CacheOutcome.FALLBACK

        if request.decision() is not AdmissionDecision.ACCEPT:
            return self._fetch_range(request, page_id, lo, n), CacheOutcome.MISS_BYPASSED
        page, outcome = self._fetch_page(request, page_id)
        if lo + n > len(page):
            raise InvalidRangeError(f"Page {page_id} holds {len(page)} bytes, need {lo + n}.")
        return page[lo : lo + n], outcome

    # -------------------------------------------------------------------------------------------- #
    def _fetch_page(self, request: _Request, page_id: PageId) -> tuple[bytes, CacheOutcome]:
        """Fetches a whole page and stores it. Concurrent misses of one page share one fetch."""
        with self._inflight_lock:
            future = self._inflight.get(page_id)
            leader = future is None
            if leader:
                future = Future()
                self._inflight[page_id] = future
        if not leader:
            wait_s = self._config.remote_timeout_s * 2
            try:
                return future.result(timeout=wait_s)
            except concurrent.futures.TimeoutError as e:
                msg = f"Shared fetch of page {page_id} did not complete within {wait_s}s."
                self._logger.error(msg)
                raise BackingUnavailableError(msg) from e

        try:
            page_size = self._config.page_size_bytes
            page = self._remote_read(request, page_id.page_index * page_size, page_size)
            outcome = (
                self._store_page(request, page_id, page) if page else CacheOutcome.MISS_BYPASSED
            )
            future.set_result((page, outcome))
            return page, outcome
        except BaseException as e:
            future.set_exception(e)
            raise
        finally:
            with self._inflight_lock:
                self._inflight.pop(page_id, None)

    def _store_page(self, request: _Request, page_id: PageId, page: bytes) -> CacheOutcome:
        if self.index.get(page_id) is not None:
            return CacheOutcome.MISS_CACHED
        placement = self._engine.place(page_id, len(page), request.scope)
        self._delete_pages(placement.evicted)
        if not placement.placed:
            self._logger.debug(f"Bypassing page {page_id}: {placement.rejection}")
            return CacheOutcome.MISS_BYPASSED

        store = self._stores[placement.dir]
        for attempt in (1, 2):
            try:
                store.write_page(page_id, page)
            except DiskFullError:
                self._record_error(ErrorClass.DISK_FULL, request.scope, op=Op.PUT)
                if attempt == 2:
                    self._abort(placement)
                    return CacheOutcome.FALLBACK
                self._early_evict(placement.dir)
                continue
            except OSError:
                self._logger.exception(f"Failed to store page {page_id}.")
                self._record_error(ErrorClass.IO, request.scope, op=Op.PUT)
                self._abort(placement)
                return CacheOutcome.FALLBACK
            meta = self._engine.commit(
                placement, created_at=request.now, ttl=self._config.default_ttl_s
            )
            if meta.dir != placement.dir:
                self._discard_page(page_id, placement.dir)
            return CacheOutcome.MISS_CACHED
        return CacheOutcome.FALLBACK  # pragma: no cover

    def _fetch_range(self, request: _Request, page_id: PageId, lo: int, n: int) -> bytes:
        start = page_id.page_index * self._config.page_size_bytes + lo
        data = self._remote_read(request, start, n)
        if len(data) != n:
            raise InvalidRangeError(f"{request.file_id} returned {len(data)} of {n} bytes.")
        return data

    def _remote_read(self, request: _Request, offset: int, length: int) -> bytes:
        future = self._remote.submit(self._backing.read, request.file_id, offset, length)
        try:
            data = future.result(timeout=self._config.remote_timeout_s)
        except concurrent.futures.TimeoutError as e:
            future.cancel()
            msg = f"Backing read of {request.file_id} exceeded {self._config.remote_timeout_s}s."
            self._logger.error(msg)
            raise BackingUnavailableError(msg) from e
        except OSError as e:
            msg = f"Backing read of {request.file_id} failed: {e}"
            self._logger.error(msg)
            raise BackingUnavailableError(msg) from e
        self._record(
            MetricKind.REMOTE_READ, scope=request.scope, nbytes=len(data), run_id=request.run_id
        )
        return data

    # -------------------------------------------------------------------------------------------- #
    #                                       ALLOCATION                                             #
    # -------------------------------------------------------------------------------------------- #
    def allocate(self, page_id: PageId, length: int) -> int:
        """Directory for a page: the file's preferred directory, else the next with room.

        Raises:
            NoSpaceError: If every directory is exhausted after eviction.
        """
        dir, evicted = self._engine.allocate(page_id, length)
        self._delete_pages(evicted)
        return dir

    # -------------------------------------------------------------------------------------------- #
    #                                     INVALIDATION                                             #
    # -------------------------------------------------------------------------------------------- #
    def invalidate_file(self, file_id: str, new_version: object) -> int:
        """Switches a file to a new version and drops every page of the old one."""
        new_cache_id = file_id_for(file_id, new_version)
        with self._versions_lock:
            known = self._versions.get(file_id)
            self._versions[file_id] = (new_version, new_cache_id)
        if known is not None:
            old_cache_id = known[1]
        else:
            old_cache_id = file_id_for(file_id, self._backing.file_version(file_id))
        if old_cache_id == new_cache_id:
            return 0
        evicted = self._engine.evict_all(list(self.index.pages_by_file(old_cache_id)))
        self._delete_pages(evicted)
        self._logger.info(f"Invalidated {len(evicted)} pages of {file_id}.")
        return len(evicted)

    # -------------------------------------------------------------------------------------------- #
    #                                         FAULTS                                               #
    # -------------------------------------------------------------------------------------------- #
    def on_fault(self, page_id: PageId, fault: FaultKind, dir: Optional[int] = None) -> FaultAction:
        """Absorbs a local fault observed on a page or directory.

        Corrupted pages are evicted at once. A full disk evicts a batch of the directory's
        pages. A timeout leaves the page in place until it has timed out
        `timeout_evict_threshold` times in a row.
        """
        fault = FaultKind(fault)
        meta = self.index.get(page_id)
        scope = meta.scope if meta is not None else Scope.global_()
        self._record_error(_FAULT_ERROR_CLASS[fault], scope)
        self._logger.warning(f"{fault.value} fault on page {page_id}.")

        if fault is FaultKind.CORRUPTED:
            self._clear_timeouts(page_id)
            self._evict(page_id)
            return FaultAction.EVICTED
        if fault is FaultKind.DISK_FULL:
            target = dir if dir is not None else (meta.dir if meta is not None else 0)
            self._early_evict(target)
            return FaultAction.EARLY_EVICTION

        with self._timeouts_lock:
            self._timeouts[page_id] += 1
            exhausted = self._timeouts[page_id] >= self._config.timeout_evict_threshold
            if exhausted:
                del self._timeouts[page_id]
        if exhausted:
            self._evict(page_id)
            return FaultAction.EVICTED
        return FaultAction.SERVED_REMOTE

    def _early_evict(self, dir: int) -> int:
        used = self.index.usage_by_dir(dir)
        nbytes = max(1, math.ceil(used * self._config.disk_full_evict_fraction))
        evicted = self._engine.evict_from_dir(dir, nbytes)
        self._delete_pages(evicted)
        self._logger.warning(
            f"Early eviction on directory {dir} removed {len(evicted)} pages "
            f"({sum(m.length for m in evicted)} bytes)."
        )
        return len(evicted)

    # -------------------------------------------------------------------------------------------- #
    #                                     BULK OPERATIONS                                          #
    # -------------------------------------------------------------------------------------------- #
    def delete_scope(self, scope: Scope) -> int:
        """Removes every page of a scope. Returns the bytes freed."""
        evicted = self._engine.evict_all(list(self.index.pages_by_scope(scope)))
        self._delete_pages(evicted, op=Op.DELETE)
        return sum(m.length for m in evicted)

    def drop_dir(self, dir: int) -> int:
        """Removes every page stored on one directory. Returns the pages removed."""
        evicted = self._engine.evict_all(list(self.index.pages_by_dir(dir)))
        self._delete_pages(evicted, op=Op.DELETE)
        return len(evicted)

    def usage_by_dir(self) -> dict[int, int]:
        return {dir: self.index.usage_by_dir(dir) for dir in range(len(self._stores))}

    def sweep_expired(self, now: Optional[float] = None) -> int:
        """Removes pages whose TTL has passed. Returns the pages removed."""
        now = self._clock() if now is None else now
        expired = self._engine.sweep_expired(now)
        self._delete_pages(expired)
        return len(expired)

    def stats(self, group_by: Iterable[str] = ()) -> pd.DataFrame:
        return self._metrics.snapshot(group_by=group_by)

    # -------------------------------------------------------------------------------------------- #
    #                                       LIFECYCLE                                              #
    # -------------------------------------------------------------------------------------------- #
    def start(self) -> CacheManager:
        """Starts the background TTL sweeper when a default TTL is configured."""
        if self._config.default_ttl_s is not None and self._sweeper is None:
            self._stopped.clear()
            self._sweeper = threading.Thread(
                target=self._sweep_loop, name="edgecache-ttl", daemon=True
            )
            self._sweeper.start()
        return self

    def close(self) -> None:
        self._stopped.set()
        if self._sweeper is not None:
            self._sweeper.join(timeout=self._config.ttl_sweep_period_s)
            self._sweeper = None
        self._remote.shutdown(wait=False, cancel_futures=True)
        for store in self._stores:
            store.close()

    def __enter__(self) -> CacheManager:
        return self.start()

    def __exit__(self, *exc: object) -> None:
        self.close()

    def _sweep_loop(self) -> None:
        while not self._stopped.wait(self._config.ttl_sweep_period_s):
            try:
                removed = self.sweep_expired()
                if removed:
                    self._logger.info(f"TTL sweep removed {removed} pages.")
            except Exception:
                self._logger.exception("TTL sweep failed.")

    def _restore(self) -> None:
        records = []
        for store in self._stores:
            records.extend(store.restore())
        records.sort(key=lambda r: (r.created_at or 0.0, r.page_id))
        ttl = self._config.default_ttl_s
        for record in records:
            created_at = record.created_at or self._clock()
            meta = PageMetadata(
                page_id=record.page_id,
                length=record.length,
                dir=record.dir,
                created_at=created_at,
                ttl=ttl,
            )
            try:
                self._engine.register(meta)
            except DuplicatePageError:
                self._logger.warning(f"Page {record.page_id} found in two directories.")
                self._stores[record.dir].delete_page(record.page_id)
        for dir, capacity in enumerate(self._config.capacities):
            excess = self.index.usage_by_dir(dir) - capacity
            if excess > 0:
                self._delete_pages(self._engine.evict_from_dir(dir, excess))
        if records:
            self._logger.info(f"Restored {len(records)} cached pages.")

    # -------------------------------------------------------------------------------------------- #
    def _evict(self, page_id: PageId) -> None:
        meta = self._engine.evict(page_id)
        if meta is not None:
            self._delete_pages([meta])

    def _delete_pages(self, pages: Iterable[PageMetadata], op: Op = Op.DELETE) -> None:
        for meta in pages:
            if not self._discard_page(meta.page_id, meta.dir):
                self._record_error(ErrorClass.IO, meta.scope, op=Op.DELETE)
            self._record(MetricKind.EVICT, op=op, scope=meta.scope, nbytes=meta.length)

    def _discard_page(self, page_id: PageId, dir: int) -> bool:
        """Deletes a page file unless the page was placed on the directory again.

        The check runs under the store's page lock, so a write committed after the index entry
        was removed keeps its file. Returns False when the delete failed.
        """
        try:
            self._stores[dir].delete_page(page_id, unless=lambda: self._engine.holds(page_id, dir))
        except OSError:
            self._logger.exception(f"Failed to delete page {page_id}.")
            return False
        return True

    def _abort(self, placement: Placement) -> None:
        self._engine.abort(placement)
        self._discard_page(placement.page_id, placement.dir)

    def _clear_timeouts(self, page_id: PageId) -> None:
        with self._timeouts_lock:
            self._timeouts.pop(page_id, None)

    def _record(
        self,
        kind: MetricKind,
        op: Op = Op.GET,
        scope: Optional[Scope] = None,
        nbytes: int = 0,
        run_id: Optional[str] = None,
    ) -> None:
        self._metrics.record(
            MetricEvent(
                kind=kind,
                op=op,
                scope=scope if scope is not None else Scope.global_(),
                bytes=nbytes,
                run_id=run_id,
            )
        )

    def _record_error(self, error_class: ErrorClass, scope: Scope, op: Op = Op.GET) -> None:
        self._metrics.record(
            MetricEvent(kind=MetricKind.ERROR, op=op, error_class=error_class, scope=scope)
        )


# ------------------------------------------------------------------------------------------------ #
class _Request:
    """Per-request state: admission is decided once, on the first missing page."""

    def __init__(
        self,
        cache: CacheManager,
        file_id: str,
        cache_id: str,
        scope: Scope,
        run_id: Optional[str],
        now: float,
    ) -> None:
        self.cache = cache
        self.file_id = file_id
        self.cache_id = cache_id
        self.scope = scope
        self.run_id = run_id
        self.now = now
        self._decision: Optional[AdmissionDecision] = None

    def decision(self) -> AdmissionDecision:
        if self._decision is None:
            cache = self.cache
            self._decision = cache._admission.decide(
                self.scope, self.file_id, self.now, cache.index
            )
            if self._decision is AdmissionDecision.REJECT_STATIC:
                cache._record(MetricKind.ADMIT_REJECT_STATIC, scope=self.scope, run_id=self.run_id)
            elif self._decision is AdmissionDecision.REJECT_RATE:
                cache._record(MetricKind.ADMIT_REJECT_RATE, scope=self.scope, run_id=self.run_id)
        return self._decision
