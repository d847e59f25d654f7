#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : Embeddable Local Page Cache                                                         #
# Version    : 0.1.0                                                                               #
# Python     : 3.10.12                                                                             #
# Filename   : /edgecache/trace/replay.py                                                          #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : Enter URL in Workspace Settings                                                     #
# ------------------------------------------------------------------------------------------------ #
# Created    : Saturday September 26th 2026 05:46:22 pm                                            #
# Modified   : Sunday September 27th 2026 03:00:00 pm                                              #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Replays a trace against a disk-backed cache and checks every byte served."""
from __future__ import annotations
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import logging
import threading
from typing import Optional

import pandas as pd

from edgecache.cache.config import CacheConfig
from edgecache.cache.manager import CacheManager, CacheOutcome, pages_spanned
from edgecache.exceptions import TraceParseError
from edgecache.index.metadata import Scope
from edgecache.metrics.registry import MetricKind, MetricsRegistry
from edgecache.service.io import TRACE_COLUMNS, TraceIO
from edgecache.store.page import PageId, PageStore
from edgecache.trace.backing import SyntheticBackingStore
from edgecache.trace.faults import (
    HANG_TIMEOUT_FACTOR,
    Fault,
    FaultSchedule,
    FaultType,
    FaultyPageStore,
)

# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)


# ------------------------------------------------------------------------------------------------ #
#                                         TRACE FILES                                              #
# ------------------------------------------------------------------------------------------------ #
def validate_trace(trace: pd.DataFrame) -> pd.DataFrame:
    """Checks the trace invariants and returns the trace with canonical columns.

    Raises:
        TraceParseError: A column is missing, a length is below one, an offset is negative, a
            scope is malformed or timestamps decrease.
    """
    missing = [c for c in TRACE_COLUMNS if c not in trace.columns]
    if missing:
        raise _parse_error(f"Trace is missing columns {missing}.")
    trace = trace[TRACE_COLUMNS].reset_index(drop=True)
    if trace.empty:
        return trace
    if (trace["length"] < 1).any():
        row = int((trace["length"] < 1).idxmax())
        raise _parse_error(f"Trace record {row} has length below 1.")
    if (trace["offset"] < 0).any():
        row = int((trace["offset"] < 0).idxmax())
        raise _parse_error(f"Trace record {row} has a negative offset.")
    if not trace["timestamp_ms"].is_monotonic_increasing:
        row = int((trace["timestamp_ms"].diff() < 0).idxmax())
        raise _parse_error(f"Trace timestamps decrease at record {row}.")
    for text in trace["scope"].unique():
        try:
            Scope.parse(text)
        except ValueError as e:
            raise _parse_error(f"Trace scope {text!r} is malformed: {e}") from e
    return trace


def load_trace(filepath: str) -> pd.DataFrame:
    try:
        trace = TraceIO.read(filepath)
    except (ValueError, TypeError) as e:
        raise _parse_error(f"Unable to parse trace {filepath}: {e}") from e
    return validate_trace(trace)


def save_trace(trace: pd.DataFrame, filepath: str) -> None:
    TraceIO.write(filepath, validate_trace(trace))


def _parse_error(msg: str) -> TraceParseError:
    logger.error(msg)
    return TraceParseError(msg)


# ------------------------------------------------------------------------------------------------ #
class TraceClock:
    """Clock driven by trace timestamps. Never moves backwards."""

    def __init__(self, now: float = 0.0) -> None:
        self._now = now
        self._lock = threading.Lock()

    def advance(self, now: float) -> float:
        with self._lock:
            self._now = max(self._now, now)
            return self._now

    def __call__(self) -> float:
        return self._now


# ------------------------------------------------------------------------------------------------ #
@dataclass
class ReplayReport:
    requests: int = 0
    mismatches: int = 0
    hit_rate: Optional[float] = None
    bytes_from_remote: int = 0
    evictions: int = 0
    faults_applied: dict = field(default_factory=dict)
    outcomes: list = field(default_factory=list)
    metrics: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.mismatches == 0

    def to_document(self) -> dict:
        return {
            "summary": {
                "requests": self.requests,
                "mismatches": self.mismatches,
                "hit_rate": self.hit_rate,
                "bytes_from_remote": self.bytes_from_remote,
                "evictions": self.evictions,
                "faults_applied": dict(self.faults_applied),
            },
            "metrics": self.metrics,
        }


# ------------------------------------------------------------------------------------------------ #
#                                          REPLAYER                                                #
# ------------------------------------------------------------------------------------------------ #
class TraceReplayer:
    """Drives a CacheManager through a trace.

    Args:
        config (CacheConfig): Cache under test. Its directories should start empty.
        backing (SyntheticBackingStore): Source of content and of the verification oracle.
        faults (FaultSchedule): Injections applied during the replay.
        metrics (MetricsRegistry): Receives the cache's events. A private registry when omitted.
        workers (int): Concurrent clients. Each request is still verified individually.
    """

    def __init__(
        self,
        config: CacheConfig,
        backing: SyntheticBackingStore,
        faults: Optional[FaultSchedule] = None,
        metrics: Optional[MetricsRegistry] = None,
        workers: int = 1,
    ) -> None:
        if workers < 1:
            raise ValueError(f"workers must be positive, got {workers}.")
        self._config = config
        self._backing = backing
        self._faults = faults if faults is not None else FaultSchedule()
        self._metrics = metrics if metrics is not None else MetricsRegistry()
        self._workers = workers
        self._applied: Counter[str] = Counter()
        self._mismatches = 0
        self._lock = threading.Lock()
        self._logger = logging.getLogger(f"{self.__class__.__name__}")

    def replay(self, trace: pd.DataFrame) -> ReplayReport:
        trace = validate_trace(trace)
        clock = TraceClock()
        stores = self._stores()
        records = list(trace.itertuples(index=False))
        outcomes: list[Optional[CacheOutcome]] = [None] * len(records)
        self._applied.clear()
        self._mismatches = 0

        with CacheManager(
            self._config, self._backing, metrics=self._metrics, clock=clock, stores=stores
        ) as cache:

            def run(i: int) -> None:
                outcomes[i] = self._request(cache, clock, i, records[i])

            if self._workers == 1:
                for i in range(len(records)):
                    run(i)
            else:
                with ThreadPoolExecutor(max_workers=self._workers) as pool:
                    list(pool.map(run, range(len(records))))

        report = ReplayReport(
            requests=len(records),
            mismatches=self._mismatches,
            hit_rate=self._metrics.hit_rate(),
            bytes_from_remote=self._metrics.total_bytes(MetricKind.REMOTE_READ),
            evictions=self._metrics.count(MetricKind.EVICT),
            faults_applied=dict(self._applied),
            outcomes=[o.value for o in outcomes],
            metrics=self._metrics.to_document(),
        )
        level = logging.INFO if report.ok else logging.ERROR
        self._logger.log(
            level,
            f"Replayed {report.requests} requests: hit rate {report.hit_rate}, "
            f"{report.mismatches} mismatches.",
        )
        return report

    # -------------------------------------------------------------------------------------------- #
    def _request(self, cache: CacheManager, clock: TraceClock, i: int, record) -> CacheOutcome:
        now = clock.advance(record.timestamp_ms / 1000.0)
        if self._config.default_ttl_s is not None:
            cache.sweep_expired(now)
        for fault in self._faults.due(i):
            if self._apply(cache, fault, record):
                with self._lock:
                    self._applied[fault.kind.value] += 1

        result = cache.read(
            record.file_id,
            int(record.offset),
            int(record.length),
            scope=Scope.parse(record.scope),
            run_id=record.run_id or None,
        )
        expected = self._backing.content(record.file_id, int(record.offset), int(record.length))
        if result.data != expected:
            with self._lock:
                self._mismatches += 1
            self._logger.error(
                f"Byte mismatch at record {i}: {record.file_id} "
                f"[{record.offset}, {record.offset + record.length})."
            )
        return result.outcome

    def _apply(self, cache: CacheManager, fault: Fault, record) -> bool:
        """Injects one fault. Returns False when it had nothing to act on."""
        stores = cache.stores
        if fault.kind is FaultType.ENOSPC:
            count = int(fault.param) if fault.param else 1
            for store in stores:
                store.arm_enospc(count)
            return True

        cached = [
            meta
            for meta in (cache.index.get(p) for p in self._target_pages(cache, fault, record))
            if meta is not None
        ]
        if not cached:
            return False
        if fault.kind is FaultType.CORRUPT:
            return sum(stores[m.dir].corrupt(m.page_id) for m in cached) > 0
        seconds = fault.param
        if seconds is None:
            seconds = self._config.read_timeout_s * HANG_TIMEOUT_FACTOR
        stores[cached[0].dir].arm_hang(seconds)
        return True

    def _target_pages(self, cache: CacheManager, fault: Fault, record) -> list[PageId]:
        if fault.target is None or fault.target == record.file_id:
            cache_id = cache.cache_id(record.file_id)
            page_size = self._config.page_size_bytes
            return [
                PageId(cache_id, i)
                for i in pages_spanned(int(record.offset), int(record.length), page_size)
            ]
        cache_id = cache.cache_id(fault.target)
        return sorted(m.page_id for m in cache.index.pages_by_file(cache_id))

    def _stores(self) -> list[PageStore]:
        return [
            FaultyPageStore(layout, dir_id=i, checksums=self._config.checksums)
            for i, layout in enumerate(self._config.layouts)
        ]
