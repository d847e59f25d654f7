#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : Embeddable Local Page Cache                                                         #
# Version    : 0.1.0                                                                               #
# Python     : 3.10.12                                                                             #
# Filename   : /edgecache/metrics/registry.py                                                      #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : Enter URL in Workspace Settings                                                     #
# ------------------------------------------------------------------------------------------------ #
# Created    : Thursday September 24th 2026 09:08:56 am                                            #
# Modified   : Friday September 25th 2026 02:38:26 pm                                              #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Cache counters with per-scope and per-run rollups."""
from __future__ import annotations
from dataclasses import dataclass, field
from enum import Enum
import logging
import threading
from typing import Iterable, Optional

import numpy as np
import pandas as pd

from edgecache.index.metadata import Scope, ScopeLevel

# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)


# ------------------------------------------------------------------------------------------------ #
class MetricKind(str, Enum):
    HIT = "hit"
    MISS_CACHED = "miss_cached"
    MISS_BYPASSED = "miss_bypassed"
    FALLBACK = "fallback"
    EVICT = "evict"
    ADMIT_REJECT_STATIC = "admit_reject_static"
    ADMIT_REJECT_RATE = "admit_reject_rate"
    ERROR = "error"
    REMOTE_READ = "remote_read"


class Op(str, Enum):
    GET = "GET"
    PUT = "PUT"
    DELETE = "DELETE"


class ErrorClass(str, Enum):
    TIMEOUT = "Timeout"
    CORRUPTED = "Corrupted"
    DISK_FULL = "DiskFull"
    IO = "Io"


# Request outcomes; the denominator of the hit rate.
LOOKUP_KINDS = (
    MetricKind.HIT,
    MetricKind.MISS_CACHED,
    MetricKind.MISS_BYPASSED,
    MetricKind.FALLBACK,
)
GROUP_KEYS = ("kind", "op", "error_class", "scope", "run_id")
VALUE_COLUMNS = ["count", "bytes"] + [k.value for k in LOOKUP_KINDS]


# ------------------------------------------------------------------------------------------------ #
@dataclass(frozen=True)
class MetricEvent:
    kind: MetricKind
    op: Op = Op.GET
    error_class: Optional[ErrorClass] = None
    scope: Scope = field(default_factory=Scope.global_)
    bytes: int = 0
    run_id: Optional[str] = None

    def __post_init__(self) -> None:
        if (self.kind is MetricKind.ERROR) != (self.error_class is not None):
            raise ValueError("ERROR events carry an error_class; other events do not.")
        if self.bytes < 0:
            raise ValueError(f"Event bytes must be non-negative, got {self.bytes}.")


# ------------------------------------------------------------------------------------------------ #
#                                      METRICS REGISTRY                                            #
# ------------------------------------------------------------------------------------------------ #
class MetricsRegistry:
    """Folds events into monotone counters keyed by (kind, op, error_class, scope, run_id)."""

    def __init__(self) -> None:
        self._counters: dict[tuple, list[int]] = {}
        self._lock = threading.Lock()

    def record(self, event: MetricEvent) -> None:
        key = (event.kind, event.op, event.error_class, event.scope, event.run_id)
        with self._lock:
            counter = self._counters.get(key)
            if counter is None:
                self._counters[key] = [1, event.bytes]
            else:
                counter[0] += 1
                counter[1] += event.bytes

    def reset(self) -> None:
        with self._lock:
            self._counters.clear()

    def count(self, kind: MetricKind, error_class: Optional[ErrorClass] = None) -> int:
        """Total events of a kind, optionally of one error class."""
        with self._lock:
            return sum(
                c[0]
                for (k, _, e, _, _), c in self._counters.items()
                if k is kind and (error_class is None or e is error_class)
            )

    def total_bytes(self, kind: MetricKind) -> int:
        with self._lock:
            return sum(c[1] for (k, *_), c in self._counters.items() if k is kind)

    def hit_rate(self) -> Optional[float]:
        """HIT over all request outcomes; None when nothing was requested."""
        lookups = sum(self.count(k) for k in LOOKUP_KINDS)
        return self.count(MetricKind.HIT) / lookups if lookups else None

    def error_breakdown(self) -> dict[str, dict[str, int]]:
        """Error counts by operation and error class, e.g. {'GET': {'Timeout': 1}}."""
        breakdown: dict[str, dict[str, int]] = {}
        with self._lock:
            for (kind, op, error_class, _, _), c in self._counters.items():
                if kind is MetricKind.ERROR:
                    by_class = breakdown.setdefault(op.value, {})
                    by_class[error_class.value] = by_class.get(error_class.value, 0) + c[0]
        return breakdown

    # -------------------------------------------------------------------------------------------- #
    def frame(self) -> pd.DataFrame:
        """One row per counter."""
        with self._lock:
            rows = [
                {
                    "kind": kind.value,
                    "op": op.value,
                    "error_class": error_class.value if error_class else "",
                    "scope": scope,
                    "run_id": run_id or "",
                    "count": c[0],
                    "bytes": c[1],
                }
                for (kind, op, error_class, scope, run_id), c in self._counters.items()
            ]
        return pd.DataFrame(rows, columns=list(GROUP_KEYS) + ["count", "bytes"])

    def snapshot(
        self, group_by: Iterable[str] = (), scope_level: Optional[int] = None
    ) -> pd.DataFrame:
        """Rolls counters up by the given keys.

        Args:
            group_by (Iterable[str]): Subset of kind, op, error_class, scope, run_id. The alias
                scope_level groups by scope.
            scope_level (int): Truncates scopes to this depth (see ScopeLevel) before grouping.

        Returns:
            DataFrame with the group keys, count, bytes, one column per request outcome and
            hit_rate. hit_rate is NaN where a group has no request outcomes.
        """
        keys = ["scope" if k == "scope_level" else k for k in group_by]
        for key in keys:
            if key not in GROUP_KEYS:
                raise ValueError(f"Unknown group key {key!r}. Expected one of {GROUP_KEYS}.")
        keys = list(dict.fromkeys(keys))

        frame = self.frame()
        if scope_level is not None:
            level = ScopeLevel(int(scope_level))
            frame["scope"] = [s.truncate(level) for s in frame["scope"]]
        frame["scope"] = frame["scope"].astype(str)
        for kind in LOOKUP_KINDS:
            frame[kind.value] = np.where(frame["kind"] == kind.value, frame["count"], 0)

        if frame.empty:
            table = pd.DataFrame(columns=keys + VALUE_COLUMNS)
        elif keys:
            table = frame.groupby(keys, sort=True)[VALUE_COLUMNS].sum().reset_index()
        else:
            table = frame[VALUE_COLUMNS].sum().to_frame().T.reset_index(drop=True)

        lookups = table[[k.value for k in LOOKUP_KINDS]].sum(axis=1).astype(float)
        table["hit_rate"] = table[MetricKind.HIT.value].astype(float) / lookups.where(lookups > 0)
        return table

    def to_document(self) -> dict:
        """Flat snapshot document with the raw counters and derived figures."""
        counters = []
        for row in self.frame().sort_values(list(GROUP_KEYS[:2])).to_dict(orient="records"):
            entry = {
                "kind": row["kind"],
                "op": row["op"],
                "scope": str(row["scope"]),
                "count": int(row["count"]),
                "bytes": int(row["bytes"]),
            }
            if row["error_class"]:
                entry["error_class"] = row["error_class"]
            if row["run_id"]:
                entry["run_id"] = row["run_id"]
            counters.append(entry)
        return {
            "counters": counters,
            "derived": {
                "hit_rate_overall": self.hit_rate(),
                "bytes_from_remote": self.total_bytes(MetricKind.REMOTE_READ),
                "evictions": self.count(MetricKind.EVICT),
                "errors": self.error_breakdown(),
            },
        }
