#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : Embeddable Local Page Cache                                                         #
# Version    : 0.1.0                                                                               #
# Python     : 3.10.12                                                                             #
# Filename   : /edgecache/scheduler/affinity.py                                                    #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : Enter URL in Workspace Settings                                                     #
# ------------------------------------------------------------------------------------------------ #
# Created    : Tuesday October 6th 2026 11:36:12 am                                                #
# Modified   : Sunday October 11th 2026 06:10:10 pm                                                #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""File-level soft-affinity scheduling over a consistent-hash ring.

Splits of one file prefer the same worker so that worker's local cache stays warm. A busy
primary hands over to the secondary; when both are busy the split goes to the least loaded
worker with caching disabled. Workers that go offline keep their ring points for a grace
period, so a quick return moves no data.
"""
from __future__ import annotations
import bisect
from dataclasses import dataclass
from enum import Enum
import hashlib
import logging
from typing import Iterable, Mapping, Optional

from edgecache.data.dataclass import DataClass
from edgecache.exceptions import RingEmptyError, UnknownNodeError

# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)
# ------------------------------------------------------------------------------------------------ #
DEFAULT_VIRTUAL_POINTS = 100
DEFAULT_GRACE_S = 600.0
MAX_REPLICAS = 2


def ring_hash(key: str) -> int:
    return int.from_bytes(hashlib.md5(key.encode("utf-8")).digest()[:8], "big")


# ------------------------------------------------------------------------------------------------ #
class Choice(str, Enum):
    PRIMARY = "primary"
    SECONDARY = "secondary"
    FALLBACK = "fallback"


@dataclass(frozen=True)
class WorkerLoad(DataClass):
    node_id: str
    assigned_splits: int = 0
    pending_splits: int = 0
    max_splits_per_node: int = 100
    max_pending_splits_per_task: int = 10

    def __post_init__(self) -> None:
        if self.assigned_splits < 0 or self.pending_splits < 0:
            raise ValueError(f"Split counts of {self.node_id} must be non-negative.")

    @property
    def busy(self) -> bool:
        return (
            self.assigned_splits >= self.max_splits_per_node
            or self.pending_splits >= self.max_pending_splits_per_task
        )

    @property
    def burden(self) -> int:
        return self.assigned_splits + self.pending_splits


@dataclass(frozen=True)
class Assignment(DataClass):
    node_id: str
    cache_enabled: bool
    choice: Choice


# ------------------------------------------------------------------------------------------------ #
#                                          HASH RING                                               #
# ------------------------------------------------------------------------------------------------ #
class HashRing:
    """Consistent-hash ring with virtual points and a grace period for departed nodes.

    Args:
        nodes (Iterable[str]): Initial members.
        virtual_points_per_node (int): Points each member places on the ring.
        grace_s (float): Seconds an offline node keeps its points.
    """

    def __init__(
        self,
        nodes: Iterable[str] = (),
        virtual_points_per_node: int = DEFAULT_VIRTUAL_POINTS,
        grace_s: float = DEFAULT_GRACE_S,
    ) -> None:
        if virtual_points_per_node < 1:
            raise ValueError("virtual_points_per_node must be positive.")
        self._vnodes = virtual_points_per_node
        self._grace = grace_s
        self._nodes: set[str] = set()
        self._offline: dict[str, float] = {}
        self._departed: set[str] = set()
        self._points: list[int] = []
        self._owners: list[str] = []
        for node in nodes:
            self._nodes.add(node)
        self._rebuild()

    # -------------------------------------------------------------------------------------------- #
    @property
    def nodes(self) -> set[str]:
        """Members owning ring points, including offline nodes in grace."""
        return set(self._nodes)

    @property
    def live_nodes(self) -> list[str]:
        return sorted(self._nodes - set(self._offline))

    @property
    def offline(self) -> dict[str, float]:
        return dict(self._offline)

    @property
    def grace_s(self) -> float:
        return self._grace

    def __len__(self) -> int:
        return len(self._nodes)

    # -------------------------------------------------------------------------------------------- #
    def add_node(self, node_id: str) -> None:
        self._departed.discard(node_id)
        self._offline.pop(node_id, None)
        if node_id not in self._nodes:
            self._nodes.add(node_id)
            self._rebuild()

    def remove_node(self, node_id: str) -> None:
        """Removes a node and its points at once."""
        self._require(node_id)
        self._nodes.discard(node_id)
        self._offline.pop(node_id, None)
        self._departed.add(node_id)
        self._rebuild()

    def node_leave(self, node_id: str, now: float) -> None:
        """Marks a node offline; it keeps its points until now + grace."""
        self._require(node_id)
        self._offline[node_id] = now + self._grace
        logger.info(f"Node {node_id} offline, grace until {self._offline[node_id]}.")

    def node_return(self, node_id: str, now: float) -> None:
        """Brings a node back. Within grace nothing moves; after expiry its points return."""
        if node_id in self._nodes:
            self._offline.pop(node_id, None)
            return
        if node_id in self._departed:
            self.add_node(node_id)
            return
        raise self._unknown(node_id)

    def expire_grace(self, now: float) -> list[str]:
        """Drops the points of offline nodes whose deadline has passed. Returns those nodes."""
        expired = sorted(n for n, deadline in self._offline.items() if deadline <= now)
        for node_id in expired:
            del self._offline[node_id]
            self._nodes.discard(node_id)
            self._departed.add(node_id)
        if expired:
            self._rebuild()
            logger.info(f"Grace expired for {expired}.")
        return expired

    # -------------------------------------------------------------------------------------------- #
    def preferred_nodes(self, file_id: str, replicas: int = MAX_REPLICAS) -> list[str]:
        """The first `replicas` distinct members clockwise from the file's hash.

        Raises:
            RingEmptyError: If the ring has no members.
        """
        if not 1 <= replicas <= MAX_REPLICAS:
            raise ValueError(f"replicas must lie in 1..{MAX_REPLICAS}, got {replicas}.")
        if not self._points:
            raise RingEmptyError("The hash ring has no nodes.")
        start = bisect.bisect_right(self._points, ring_hash(file_id))
        preferred: list[str] = []
        for i in range(len(self._points)):
            owner = self._owners[(start + i) % len(self._points)]
            if owner not in preferred:
                preferred.append(owner)
                if len(preferred) == replicas:
                    break
        return preferred

    def primary(self, file_id: str) -> str:
        return self.preferred_nodes(file_id, replicas=1)[0]

    def assign_split(self, file_id: str, loads: Mapping[str, WorkerLoad]) -> Assignment:
        """Places a split of the file.

        Offline nodes count as busy. Nodes missing from `loads` count as idle.

        Raises:
            RingEmptyError: If no live node can take the split.
        """
        preferred = self.preferred_nodes(file_id, replicas=MAX_REPLICAS)
        for node_id, choice in zip(preferred, (Choice.PRIMARY, Choice.SECONDARY)):
            if not self._busy(node_id, loads):
                return Assignment(node_id=node_id, cache_enabled=True, choice=choice)

        live = self.live_nodes
        if not live:
            raise RingEmptyError("Every node on the ring is offline.")
        idle = [n for n in live if not self._busy(n, loads)]
        candidates = idle or live
        node_id = min(candidates, key=lambda n: (self._load(n, loads).burden, n))
        return Assignment(node_id=node_id, cache_enabled=False, choice=Choice.FALLBACK)

    # -------------------------------------------------------------------------------------------- #
    def _busy(self, node_id: str, loads: Mapping[str, WorkerLoad]) -> bool:
        return node_id in self._offline or self._load(node_id, loads).busy

    @staticmethod
    def _load(node_id: str, loads: Mapping[str, WorkerLoad]) -> WorkerLoad:
        load: Optional[WorkerLoad] = loads.get(node_id)
        return load if load is not None else WorkerLoad(node_id=node_id)

    def _rebuild(self) -> None:
        points = sorted(
            (ring_hash(f"{node}-vn-{i}"), node) for node in self._nodes for i in range(self._vnodes)
        )
        self._points = [p for p, _ in points]
        self._owners = [n for _, n in points]

    def _require(self, node_id: str) -> None:
        if node_id not in self._nodes:
            raise self._unknown(node_id)

    @staticmethod
    def _unknown(node_id: str) -> UnknownNodeError:
        msg = f"Node {node_id} is not on the ring."
        logger.error(msg)
        return UnknownNodeError(msg)
