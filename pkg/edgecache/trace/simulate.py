#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : Embeddable Local Page Cache                                                         #
# Version    : 0.1.0                                                                               #
# Python     : 3.10.12                                                                             #
# Filename   : /edgecache/trace/simulate.py                                                        #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : Enter URL in Workspace Settings                                                     #
# ------------------------------------------------------------------------------------------------ #
# Created    : Friday October 2nd 2026 07:00:00 pm                                                 #
# Modified   : Monday October 5th 2026 04:46:22 pm                                                 #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""In-memory cache simulation.

The simulator runs the same placement engine and admission controller as the disk-backed
cache, with page lengths taken from the backing store's file sizes instead of stored bytes. On
a fault-free single-client replay both make identical hit and miss decisions.
"""
from __future__ import annotations
from dataclasses import dataclass, field, fields
import logging
from typing import Iterable, Optional

import pandas as pd

from edgecache.admission.controller import AdmissionController, AdmissionDecision
from edgecache.cache.config import CacheConfig
from edgecache.cache.manager import BackingStore, CacheOutcome, combine_outcomes, pages_spanned
from edgecache.cache.placement import PlacementEngine
from edgecache.data.dataclass import DataClass
from edgecache.eviction.policy import create_policy
from edgecache.index.metadata import Scope
from edgecache.quota.manager import QuotaManager
from edgecache.store.page import PageId, file_id_for
from edgecache.trace.replay import validate_trace

# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)


# ------------------------------------------------------------------------------------------------ #
@dataclass
class SimulationReport:
    requests: int = 0
    hits: int = 0
    bytes_requested: int = 0
    bytes_fetched: int = 0
    remote_requests: int = 0
    evictions: int = 0
    outcomes: list = field(default_factory=list)

    @property
    def hit_rate(self) -> Optional[float]:
        return self.hits / self.requests if self.requests else None

    @property
    def read_amplification(self) -> Optional[float]:
        """Bytes fetched from the backing store per byte requested."""
        return self.bytes_fetched / self.bytes_requested if self.bytes_requested else None

    def to_document(self) -> dict:
        return {
            "requests": self.requests,
            "hits": self.hits,
            "hit_rate": self.hit_rate,
            "bytes_requested": self.bytes_requested,
            "bytes_fetched": self.bytes_fetched,
            "remote_requests": self.remote_requests,
            "read_amplification": self.read_amplification,
            "evictions": self.evictions,
        }


@dataclass(frozen=True)
class SweepPoint(DataClass):
    page_size_bytes: int
    hit_rate: float
    read_amplification: float
    remote_requests: int
    bytes_fetched: int


# ------------------------------------------------------------------------------------------------ #
#                                        CACHE SIMULATOR                                           #
# ------------------------------------------------------------------------------------------------ #
class CacheSimulator:
    """Pure in-memory model of CacheManager.

    Args:
        config (CacheConfig): Cache being modelled. Directories are never touched.
        backing (BackingStore): Supplies file versions and lengths; never read.
    """

    def __init__(self, config: CacheConfig, backing: BackingStore) -> None:
        self._config = config
        self._backing = backing
        self._engine = PlacementEngine(
            capacities=config.capacities,
            policy=create_policy(config.eviction_policy, seed=config.seed),
            quota=QuotaManager(config.quotas),
            seed=config.seed,
        )
        self._admission = AdmissionController.from_config(config.admission)
        self._report = SimulationReport()
        self._logger = logging.getLogger(f"{self.__class__.__name__}")

    @property
    def engine(self) -> PlacementEngine:
        return self._engine

    @property
    def report(self) -> SimulationReport:
        return self._report

    def simulate(self, trace: pd.DataFrame) -> SimulationReport:
        for record in validate_trace(trace).itertuples(index=False):
            self.access(
                record.file_id,
                int(record.offset),
                int(record.length),
                now=record.timestamp_ms / 1000.0,
                scope=Scope.parse(record.scope),
            )
        self._logger.info(
            f"Simulated {self._report.requests} requests: hit rate {self._report.hit_rate}."
        )
        return self._report

    def access(
        self, file_id: str, offset: int, length: int, now: float, scope: Optional[Scope] = None
    ) -> CacheOutcome:
        """Models one read and returns its outcome."""
        scope = scope if scope is not None else Scope.global_()
        if self._config.default_ttl_s is not None:
            self._report.evictions += len(self._engine.sweep_expired(now))

        cache_id = file_id_for(file_id, self._backing.file_version(file_id))
        file_length = self._backing.file_length(file_id)
        page_size = self._config.page_size_bytes
        decision: Optional[AdmissionDecision] = None
        outcomes = []
        for index in pages_spanned(offset, length, page_size):
            page_id = PageId(cache_id, index)
            start = index * page_size
            n = min(offset + length, start + page_size) - max(offset, start)
            if self._engine.index.get(page_id) is not None:
                self._engine.touch(page_id, now)
                outcomes.append(CacheOutcome.HIT)
                continue
            if decision is None:
                decision = self._admission.decide(scope, file_id, now, self._engine.index)
            if decision is not AdmissionDecision.ACCEPT:
                self._fetched(n)
                outcomes.append(CacheOutcome.MISS_BYPASSED)
                continue
            page_length = page_size if file_length is None else min(page_size, file_length - start)
            self._fetched(page_length)
            outcomes.append(self._store(page_id, page_length, scope, now))

        outcome = combine_outcomes(outcomes)
        self._report.requests += 1
        self._report.bytes_requested += length
        self._report.hits += outcome is CacheOutcome.HIT
        self._report.outcomes.append(outcome.value)
        return outcome

    def _store(self, page_id: PageId, length: int, scope: Scope, now: float) -> CacheOutcome:
        placement = self._engine.place(page_id, length, scope)
        self._report.evictions += len(placement.evicted)
        if not placement.placed:
            return CacheOutcome.MISS_BYPASSED
        self._engine.commit(placement, created_at=now, ttl=self._config.default_ttl_s)
        return CacheOutcome.MISS_CACHED

    def _fetched(self, nbytes: int) -> None:
        self._report.bytes_fetched += nbytes
        self._report.remote_requests += 1


# ------------------------------------------------------------------------------------------------ #
def page_size_sweep(
    trace: pd.DataFrame,
    config: CacheConfig,
    backing: BackingStore,
    page_sizes: Iterable[int],
) -> pd.DataFrame:
    """Simulates the trace once per page size at unchanged byte capacity."""
    points: list[pd.DataFrame] = []
    for page_size in page_sizes:
        simulator = CacheSimulator(config.with_overrides(page_size_bytes=int(page_size)), backing)
        result = simulator.simulate(trace)
        points.append(
            SweepPoint(
                page_size_bytes=int(page_size),
                hit_rate=float("nan") if result.hit_rate is None else result.hit_rate,
                read_amplification=(
                    float("nan")
                    if result.read_amplification is None
                    else result.read_amplification
                ),
                remote_requests=result.remote_requests,
                bytes_fetched=result.bytes_fetched,
            ).as_df()
        )
    if not points:
        return pd.DataFrame(columns=[f.name for f in fields(SweepPoint)])
    return pd.concat(points, ignore_index=True)
