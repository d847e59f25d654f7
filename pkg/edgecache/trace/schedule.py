#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : Embeddable Local Page Cache                                                         #
# Version    : 0.1.0                                                                               #
# Python     : 3.10.12                                                                             #
# Filename   : /edgecache/trace/schedule.py                                                        #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : Enter URL in Workspace Settings                                                     #
# ------------------------------------------------------------------------------------------------ #
# Created    : Tuesday September 29th 2026 06:23:41 pm                                             #
# Modified   : Thursday October 1st 2026 03:53:11 pm                                               #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Split placement simulation over a churning worker pool."""
from __future__ import annotations
from collections import Counter, deque
from dataclasses import dataclass, field
from enum import Enum
import logging
from typing import Iterable, Optional

import pandas as pd

from edgecache.data.dataclass import DataClass
from edgecache.exceptions import TraceParseError
from edgecache.scheduler.affinity import (
    DEFAULT_GRACE_S,
    DEFAULT_VIRTUAL_POINTS,
    MAX_REPLICAS,
    Choice,
    HashRing,
    WorkerLoad,
)
from edgecache.service.io import IOService
from edgecache.trace.replay import validate_trace

# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)
# ------------------------------------------------------------------------------------------------ #
CHURN_KEYS = frozenset({"at_request_index", "kind", "node"})
DEFAULT_INFLIGHT_WINDOW = 50


def node_name(i: int) -> str:
    return f"node-{i:03d}"


# ------------------------------------------------------------------------------------------------ #
class ChurnKind(str, Enum):
    LEAVE = "leave"
    RETURN = "return"
    ADD = "add"
    REMOVE = "remove"
    EXPIRE = "expire"


@dataclass(frozen=True)
class ChurnEvent(DataClass):
    at_request_index: int
    kind: ChurnKind
    node: str

    @classmethod
    def from_document(cls, document: dict) -> ChurnEvent:
        if not isinstance(document, dict):
            raise TraceParseError(f"A churn event must be a mapping, got {document!r}.")
        unknown = sorted(set(document) - CHURN_KEYS)
        if unknown:
            raise TraceParseError(f"Unknown churn event key '{unknown[0]}'.")
        try:
            kind = ChurnKind(document["kind"])
            index = int(document["at_request_index"])
            node = str(document["node"])
        except KeyError as e:
            raise TraceParseError(f"Churn event is missing {e}.") from e
        except ValueError as e:
            raise TraceParseError(f"Invalid churn event {document}: {e}") from e
        if kind is ChurnKind.EXPIRE or index < 0:
            raise TraceParseError(f"Invalid churn event {document}.")
        return cls(at_request_index=index, kind=kind, node=node)


class ChurnSchedule:
    def __init__(self, events: Iterable[ChurnEvent] = ()) -> None:
        self._events = sorted(events, key=lambda e: e.at_request_index)

    @classmethod
    def from_document(cls, document: object) -> ChurnSchedule:
        if isinstance(document, dict):
            document = document.get("events", [])
        if not isinstance(document, list):
            raise TraceParseError("A churn schedule must be a list of events.")
        return cls(ChurnEvent.from_document(d) for d in document)

    @classmethod
    def from_file(cls, filepath: str) -> ChurnSchedule:
        return cls.from_document(IOService.read(filepath))

    @property
    def events(self) -> list[ChurnEvent]:
        return list(self._events)

    def due(self, index: int) -> list[ChurnEvent]:
        return [e for e in self._events if e.at_request_index == index]


# ------------------------------------------------------------------------------------------------ #
@dataclass
class ScheduleReport:
    splits: int = 0
    node_splits: dict = field(default_factory=dict)
    affinity_hits: int = 0
    fallbacks: int = 0
    remaps: list = field(default_factory=list)

    @property
    def affinity_hit_fraction(self) -> Optional[float]:
        return self.affinity_hits / self.splits if self.splits else None

    @property
    def fallback_fraction(self) -> Optional[float]:
        return self.fallbacks / self.splits if self.splits else None

    def node_shares(self) -> dict[str, float]:
        if not self.splits:
            return {}
        return {n: c / self.splits for n, c in sorted(self.node_splits.items())}

    def to_document(self) -> dict:
        return {
            "splits": self.splits,
            "node_splits": dict(sorted(self.node_splits.items())),
            "affinity_hit_fraction": self.affinity_hit_fraction,
            "fallback_fraction": self.fallback_fraction,
            "remaps": list(self.remaps),
        }


# ------------------------------------------------------------------------------------------------ #
#                                        SCHEDULE SIM                                              #
# ------------------------------------------------------------------------------------------------ #
def remap_fraction(before: dict[str, str], after: dict[str, str]) -> float:
    """Share of keys whose primary node differs between two assignments."""
    if not before:
        return 0.0
    return sum(before[k] != after.get(k) for k in before) / len(before)


def simulate_schedule(
    trace: pd.DataFrame,
    node_count: int,
    churn: Optional[ChurnSchedule] = None,
    virtual_points_per_node: int = DEFAULT_VIRTUAL_POINTS,
    grace_s: float = DEFAULT_GRACE_S,
    inflight_window: int = DEFAULT_INFLIGHT_WINDOW,
    max_splits_per_node: int = 100,
    max_pending_splits_per_task: int = 10,
) -> ScheduleReport:
    """Assigns one split per trace record through the hash ring.

    Each split occupies its node for the next `inflight_window` records and is pending for the
    first tenth of that window, which is the load the ring consults. Remap fractions are taken
    over the distinct files of the trace, comparing primaries before and after each churn event
    and each grace expiry.
    """
    if node_count < 1:
        raise ValueError(f"node_count must be positive, got {node_count}.")
    trace = validate_trace(trace)
    churn = churn if churn is not None else ChurnSchedule()
    ring = HashRing(
        [node_name(i) for i in range(node_count)],
        virtual_points_per_node=virtual_points_per_node,
        grace_s=grace_s,
    )
    files = list(dict.fromkeys(trace["file_id"]))
    pending_span = max(1, inflight_window // 10)
    inflight: deque[tuple[int, str]] = deque()
    assigned: Counter[str] = Counter()
    report = ScheduleReport()

    def primaries() -> dict[str, str]:
        return {f: ring.primary(f) for f in files} if len(ring) else {}

    for i, record in enumerate(trace.itertuples(index=False)):
        now = record.timestamp_ms / 1000.0
        for event in churn.due(i):
            before = primaries()
            _apply(ring, event, now)
            report.remaps.append(_remap_entry(i, event.kind, event.node, before, primaries()))
        before = primaries() if ring.offline else {}
        expired = ring.expire_grace(now)
        if expired:
            after = primaries()
            for node in expired:
                report.remaps.append(_remap_entry(i, ChurnKind.EXPIRE, node, before, after))

        while inflight and inflight[0][0] <= i - inflight_window:
            _, node = inflight.popleft()
            assigned[node] -= 1
        pending = Counter(n for start, n in inflight if start > i - pending_span)
        loads = {
            node: WorkerLoad(
                node_id=node,
                assigned_splits=assigned[node],
                pending_splits=pending[node],
                max_splits_per_node=max_splits_per_node,
                max_pending_splits_per_task=max_pending_splits_per_task,
            )
            for node in ring.nodes
        }
        assignment = ring.assign_split(record.file_id, loads)
        preferred = ring.preferred_nodes(record.file_id, replicas=min(MAX_REPLICAS, len(ring)))
        report.splits += 1
        report.node_splits[assignment.node_id] = report.node_splits.get(assignment.node_id, 0) + 1
        report.affinity_hits += assignment.node_id in preferred
        report.fallbacks += assignment.choice is Choice.FALLBACK
        inflight.append((i, assignment.node_id))
        assigned[assignment.node_id] += 1

    logger.info(
        f"Scheduled {report.splits} splits on {node_count} nodes: affinity "
        f"{report.affinity_hit_fraction}, fallback {report.fallback_fraction}."
    )
    return report


def _apply(ring: HashRing, event: ChurnEvent, now: float) -> None:
    if event.kind is ChurnKind.LEAVE:
        ring.node_leave(event.node, now)
    elif event.kind is ChurnKind.RETURN:
        ring.node_return(event.node, now)
    elif event.kind is ChurnKind.ADD:
        ring.add_node(event.node)
    elif event.kind is ChurnKind.REMOVE:
        ring.remove_node(event.node)


def _remap_entry(
    index: int, kind: ChurnKind, node: str, before: dict[str, str], after: dict[str, str]
) -> dict:
    return {
        "at_request_index": index,
        "kind": kind.value,
        "node": node,
        "remap_fraction": remap_fraction(before, after),
    }
