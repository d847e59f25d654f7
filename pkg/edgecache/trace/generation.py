#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : Embeddable Local Page Cache                                                         #
# Version    : 0.1.0                                                                               #
# Python     : 3.10.12                                                                             #
# Filename   : /edgecache/trace/generation.py                                                      #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : Enter URL in Workspace Settings                                                     #
# ------------------------------------------------------------------------------------------------ #
# Created    : Wednesday September 23rd 2026 05:09:03 pm                                           #
# Modified   : Wednesday September 30th 2026 02:07:49 pm                                           #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Skewed read workloads.

Objects are ranked by popularity. Under `zipf` popularity the object of rank r is drawn with
probability proportional to r^-s. Under `hotset` popularity a fixed share of reads goes
uniformly to the top fraction of objects and the rest uniformly to the others. Read sizes are
drawn from a mixture of log-uniform bands dominated by small reads.
"""
from __future__ import annotations
from dataclasses import dataclass, field
from enum import Enum
import logging
from typing import Any, Optional

import numpy as np
import pandas as pd
from scipy import stats

from edgecache.data.dataclass import DataClass
from edgecache.exceptions import InvalidSpecError
from edgecache.service.io import TRACE_COLUMNS, IOService

# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)
# ------------------------------------------------------------------------------------------------ #
KIB = 1024
MIB = 1024 * KIB
DEFAULT_OBJECT_SIZE = 4 * MIB
DEFAULT_FIT_RANKS = 200


# ------------------------------------------------------------------------------------------------ #
class Popularity(str, Enum):
    ZIPF = "zipf"
    HOTSET = "hotset"


@dataclass(frozen=True)
class SizeBand(DataClass):
    """Read sizes drawn log-uniformly from [low, high] with the given mixture weight."""

    low: int
    high: int
    weight: float

    def __post_init__(self) -> None:
        if not 1 <= self.low <= self.high:
            raise InvalidSpecError(
                f"Size band needs 1 <= low <= high, got {self.low}..{self.high}."
            )
        if self.weight <= 0:
            raise InvalidSpecError(f"Size band weight must be positive, got {self.weight}.")


DEFAULT_SIZE_MIXTURE = (
    SizeBand(low=1 * KIB, high=8 * KIB, weight=0.60),
    SizeBand(low=10 * KIB, high=512 * KIB, weight=0.35),
    SizeBand(low=1 * MIB, high=4 * MIB, weight=0.05),
)


# ------------------------------------------------------------------------------------------------ #
#                                       WORKLOAD SPEC                                              #
# ------------------------------------------------------------------------------------------------ #
@dataclass(frozen=True)
class ZipfWorkloadSpec(DataClass):
    """Parameters of a synthetic read trace.

    Args:
        object_count (int): Distinct files.
        zipf_s (float): Skew exponent. Zero gives uniform popularity.
        request_count (int): Trace length.
        seed (int): Seeds every random draw.
        popularity (Popularity): zipf or hotset.
        hot_fraction (float): Share of objects in the hot set (hotset popularity).
        hot_share (float): Share of reads sent to the hot set (hotset popularity).
        object_size (int): Size of every file in bytes. Reads never cross the end of a file.
        size_mixture (tuple[SizeBand, ...]): Read-size mixture.
        tables (int): Objects are spread over this many tables of `schema`. Zero leaves every
            read in the global scope.
        partitions_per_table (int): Partitions per table when tables are used.
        schema (str): Schema of the generated tables.
        runs (int): The trace is cut into this many consecutive runs with their own run ids.
        interarrival_ms (int): Milliseconds between consecutive requests.
    """

    object_count: int
    request_count: int
    zipf_s: float = 1.0
    seed: int = 0
    popularity: Popularity = Popularity.ZIPF
    hot_fraction: float = 0.01
    hot_share: float = 0.89
    object_size: int = DEFAULT_OBJECT_SIZE
    size_mixture: tuple[SizeBand, ...] = field(default=DEFAULT_SIZE_MIXTURE)
    tables: int = 0
    partitions_per_table: int = 1
    schema: str = "default"
    runs: int = 1
    interarrival_ms: int = 1

    def __post_init__(self) -> None:
        if self.object_count < 1:
            self._fail("object_count must be positive")
        if self.request_count < 1:
            self._fail("request_count must be positive")
        if not np.isfinite(self.zipf_s) or self.zipf_s < 0:
            self._fail(f"zipf_s must be a finite non-negative number, got {self.zipf_s}")
        if not 0 < self.hot_fraction <= 1:
            self._fail("hot_fraction must lie in (0, 1]")
        if not 0 <= self.hot_share <= 1:
            self._fail("hot_share must lie in [0, 1]")
        if self.object_size < 1:
            self._fail("object_size must be positive")
        if not self.size_mixture:
            self._fail("size_mixture needs at least one band")
        if self.tables < 0 or self.partitions_per_table < 1:
            self._fail("tables must be non-negative and partitions_per_table positive")
        if not self.schema or "." in self.schema:
            self._fail(f"schema {self.schema!r} is not a valid scope component")
        if self.runs < 1:
            self._fail("runs must be positive")
        if self.interarrival_ms < 0:
            self._fail("interarrival_ms must be non-negative")

    @classmethod
    def from_document(cls, document: dict) -> ZipfWorkloadSpec:
        if not isinstance(document, dict):
            raise InvalidSpecError("A workload spec must be a mapping.")
        known = {f for f in cls.__dataclass_fields__}
        unknown = sorted(set(document) - known)
        if unknown:
            raise InvalidSpecError(f"Unknown workload spec key '{unknown[0]}'.")
        values: dict[str, Any] = dict(document)
        try:
            if "popularity" in values:
                values["popularity"] = Popularity(values["popularity"])
            if "size_mixture" in values:
                values["size_mixture"] = tuple(SizeBand(**band) for band in values["size_mixture"])
            return cls(**values)
        except InvalidSpecError:
            raise
        except (TypeError, ValueError) as e:
            raise InvalidSpecError(f"Invalid workload spec: {e}") from e

    @classmethod
    def from_file(cls, filepath: str) -> ZipfWorkloadSpec:
        return cls.from_document(IOService.read(filepath))

    @staticmethod
    def _fail(reason: str) -> None:
        msg = f"Invalid workload spec: {reason}."
        logger.error(msg)
        raise InvalidSpecError(msg)


# ------------------------------------------------------------------------------------------------ #
def object_id(rank: int) -> str:
    return f"obj_{rank:06d}"


def zipf_pmf(object_count: int, s: float) -> np.ndarray:
    """Probabilities of ranks 1..object_count under r^-s, summing to one."""
    weights = np.arange(1, object_count + 1, dtype=np.float64) ** -float(s)
    return weights / weights.sum()


def hotset_pmf(object_count: int, hot_fraction: float, hot_share: float) -> np.ndarray:
    hot = max(1, int(round(object_count * hot_fraction)))
    if hot >= object_count:
        return np.full(object_count, 1.0 / object_count)
    pmf = np.empty(object_count)
    pmf[:hot] = hot_share / hot
    pmf[hot:] = (1.0 - hot_share) / (object_count - hot)
    return pmf / pmf.sum()


def popularity_pmf(spec: ZipfWorkloadSpec) -> np.ndarray:
    if spec.popularity is Popularity.HOTSET:
        return hotset_pmf(spec.object_count, spec.hot_fraction, spec.hot_share)
    return zipf_pmf(spec.object_count, spec.zipf_s)


def object_scope(spec: ZipfWorkloadSpec, rank: int) -> str:
    if spec.tables == 0:
        return ""
    table = (rank - 1) % spec.tables
    partition = ((rank - 1) // spec.tables) % spec.partitions_per_table
    return f"{spec.schema}.t{table:03d}.p{partition:03d}"


# ------------------------------------------------------------------------------------------------ #
#                                         GENERATE                                                 #
# ------------------------------------------------------------------------------------------------ #
def generate(spec: ZipfWorkloadSpec) -> pd.DataFrame:
    """Draws a trace. Identical specs give identical traces."""
    rng = np.random.default_rng(spec.seed)
    n = spec.request_count
    ranks = rng.choice(spec.object_count, size=n, p=popularity_pmf(spec)) + 1

    weights = np.array([b.weight for b in spec.size_mixture], dtype=np.float64)
    bands = rng.choice(len(spec.size_mixture), size=n, p=weights / weights.sum())
    low = np.log(np.array([b.low for b in spec.size_mixture], dtype=np.float64))[bands]
    high = np.log(np.array([b.high for b in spec.size_mixture], dtype=np.float64))[bands]
    lengths = np.floor(np.exp(rng.uniform(low, np.nextafter(high, np.inf)))).astype(np.int64)
    lengths = np.clip(lengths, 1, spec.object_size)
    offsets = np.floor(rng.random(n) * (spec.object_size - lengths + 1)).astype(np.int64)

    scopes = {r: object_scope(spec, r) for r in np.unique(ranks)}
    runs = (np.arange(n) * spec.runs) // n
    trace = pd.DataFrame(
        {
            "timestamp_ms": np.arange(n, dtype=np.int64) * spec.interarrival_ms,
            "file_id": [object_id(r) for r in ranks],
            "offset": offsets,
            "length": lengths,
            "scope": [scopes[r] for r in ranks],
            "run_id": [f"run-{i:03d}" for i in runs] if spec.runs > 1 else "",
        },
        columns=TRACE_COLUMNS,
    )
    logger.debug(
        f"Generated {n} requests over {spec.object_count} objects ({spec.popularity.value})."
    )
    return trace


# ------------------------------------------------------------------------------------------------ #
#                                     CHARACTERISATION                                             #
# ------------------------------------------------------------------------------------------------ #
def rank_frequency(trace: pd.DataFrame) -> np.ndarray:
    """Access counts per object, most popular first."""
    return np.sort(trace["file_id"].value_counts().to_numpy())[::-1]


def fit_zipf_slope(counts: np.ndarray, top: Optional[int] = DEFAULT_FIT_RANKS) -> float:
    """Least-squares slope of log(count) against log(rank) over the most popular ranks."""
    counts = np.sort(np.asarray(counts, dtype=np.float64))[::-1]
    counts = counts[counts > 0]
    if top is not None:
        counts = counts[:top]
    if len(counts) < 2:
        raise ValueError("At least two ranks with accesses are needed to fit a slope.")
    ranks = np.arange(1, len(counts) + 1, dtype=np.float64)
    return float(stats.linregress(np.log(ranks), np.log(counts)).slope)


def top_share(trace: pd.DataFrame, fraction: float = 0.01) -> float:
    """Share of requests received by the top `fraction` of accessed objects."""
    counts = rank_frequency(trace)
    k = max(1, int(round(len(counts) * fraction)))
    return float(counts[:k].sum() / counts.sum())


def characterise(trace: pd.DataFrame, top_fraction: float = 0.01) -> dict:
    """Summary figures of a trace: volume, skew and read-size percentiles."""
    if trace.empty:
        return {"requests": 0, "objects": 0}
    counts = rank_frequency(trace)
    lengths = trace["length"].to_numpy()
    summary = {
        "requests": int(len(trace)),
        "objects": int(len(counts)),
        "bytes_requested": int(lengths.sum()),
        "top_fraction": top_fraction,
        "top_share": top_share(trace, top_fraction),
        "read_size_p50": float(np.percentile(lengths, 50)),
        "read_size_p90": float(np.percentile(lengths, 90)),
        "read_size_p99": float(np.percentile(lengths, 99)),
    }
    summary["zipf_slope"] = fit_zipf_slope(counts) if len(counts) > 1 else None
    return summary
