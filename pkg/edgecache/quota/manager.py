#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : Embeddable Local Page Cache                                                         #
# Version    : 0.1.0                                                                               #
# Python     : 3.10.12                                                                             #
# Filename   : /edgecache/quota/manager.py                                                         #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : Enter URL in Workspace Settings                                                     #
# ------------------------------------------------------------------------------------------------ #
# Created    : Wednesday September 30th 2026 10:22:34 am                                           #
# Modified   : Saturday October 3rd 2026 04:24:48 pm                                               #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Hierarchical quota over scopes.

Capacities are checked from the most specific scope of a page up to the global scope. Child
capacities may add up to more than their parent's; the parent rule still binds. Partition
overflow is resolved inside the partition in policy order, overflow at table level or above by
evicting pages drawn uniformly at random across the scope.
"""
from __future__ import annotations
from collections import Counter
from contextlib import contextmanager
from dataclasses import dataclass
from enum import Enum
import logging
import random
import threading
from typing import Callable, Iterator, Optional, Sequence

from edgecache.data.dataclass import DataClass
from edgecache.eviction.policy import EvictionPolicy
from edgecache.exceptions import ConfigurationError, ImpossibleFitError, InvalidRangeError
from edgecache.index.metadata import MetadataIndex, Scope, ScopeLevel
from edgecache.store.page import PageId

# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)
# ------------------------------------------------------------------------------------------------ #
UsageFn = Callable[[Scope], int]
EvictFn = Callable[[PageId], int]


# ------------------------------------------------------------------------------------------------ #
class EvictionMode(str, Enum):
    PARTITION_LOCAL = "partition_local"
    RANDOM_ACROSS_CHILDREN = "random_across_children"


# ------------------------------------------------------------------------------------------------ #
@dataclass(frozen=True)
class QuotaRule(DataClass):
    scope: Scope
    capacity: int

    def __post_init__(self) -> None:
        if self.capacity < 1:
            raise ConfigurationError(
                f"Quota capacity for scope '{self.scope}' must be positive, got {self.capacity}."
            )

    @classmethod
    def from_document(cls, document: dict) -> QuotaRule:
        unknown = sorted(set(document) - {"scope", "capacity_bytes"})
        if unknown:
            raise ConfigurationError(f"Unknown key '{unknown[0]}' in quota rule.")
        try:
            return cls(
                scope=Scope.parse(document.get("scope", "")),
                capacity=int(document["capacity_bytes"]),
            )
        except KeyError as e:
            raise ConfigurationError("Quota rule requires 'capacity_bytes'.") from e
        except ValueError as e:
            raise ConfigurationError(f"Invalid quota rule {document}: {e}") from e

    def to_document(self) -> dict:
        return {"scope": str(self.scope), "capacity_bytes": self.capacity}


@dataclass(frozen=True)
class EvictionDemand(DataClass):
    scope: Scope
    bytes: int
    mode: EvictionMode


@dataclass(frozen=True)
class Verdict(DataClass):
    demands: tuple[EvictionDemand, ...] = ()

    @property
    def fits(self) -> bool:
        return not self.demands


# ------------------------------------------------------------------------------------------------ #
#                                        QUOTA MANAGER                                             #
# ------------------------------------------------------------------------------------------------ #
class QuotaManager:
    """Holds quota rules and bytes reserved by writes in flight.

    Args:
        rules (Sequence[QuotaRule]): At most one rule per scope.
        global_capacity (int): Capacity for the global scope when no explicit global rule is
            given. None leaves the global scope unbounded.
    """

    def __init__(
        self, rules: Sequence[QuotaRule] = (), global_capacity: Optional[int] = None
    ) -> None:
        self._rules: dict[Scope, int] = {}
        for rule in rules:
            if rule.scope in self._rules:
                msg = f"More than one quota rule for scope '{rule.scope}'."
                logger.error(msg)
                raise ConfigurationError(msg)
            self._rules[rule.scope] = rule.capacity
        if global_capacity is not None and Scope.global_() not in self._rules:
            self._rules[Scope.global_()] = global_capacity
        self._reserved: Counter[Scope] = Counter()
        self._lock = threading.Lock()

    @property
    def rules(self) -> list[QuotaRule]:
        return [QuotaRule(scope=s, capacity=c) for s, c in sorted(self._rules.items())]

    def capacity(self, scope: Scope) -> Optional[int]:
        return self._rules.get(scope)

    # -------------------------------------------------------------------------------------------- #
    def check(self, scope: Scope, incoming: int, usage: UsageFn) -> Verdict:
        """Walks the scope's lineage bottom-up and emits one demand per overflowing rule.

        Raises:
            ImpossibleFitError: If incoming alone exceeds a capacity on the path.
        """
        if incoming < 1:
            raise InvalidRangeError(f"Incoming bytes must be at least 1, got {incoming}.")
        demands = []
        for level in scope.lineage():
            capacity = self._rules.get(level)
            if capacity is None:
                continue
            if incoming > capacity:
                msg = f"{incoming} bytes can never fit quota {capacity} of scope '{level}'."
                logger.debug(msg)
                raise ImpossibleFitError(msg)
            used = usage(level) + self.reserved(level)
            if used + incoming > capacity:
                mode = (
                    EvictionMode.PARTITION_LOCAL
                    if level.level == ScopeLevel.PARTITION
                    else EvictionMode.RANDOM_ACROSS_CHILDREN
                )
                demands.append(
                    EvictionDemand(scope=level, bytes=used + incoming - capacity, mode=mode)
                )
        return Verdict(demands=tuple(demands))

    # -------------------------------------------------------------------------------------------- #
    def reserve(self, scope: Scope, nbytes: int) -> None:
        with self._lock:
            for level in scope.lineage():
                self._reserved[level] += nbytes

    def release(self, scope: Scope, nbytes: int) -> None:
        with self._lock:
            for level in scope.lineage():
                self._reserved[level] -= nbytes
                if self._reserved[level] <= 0:
                    del self._reserved[level]

    def reserved(self, scope: Scope) -> int:
        return self._reserved.get(scope, 0)

    @contextmanager
    def reservation(self, scope: Scope, nbytes: int) -> Iterator[None]:
        self.reserve(scope, nbytes)
        try:
            yield
        finally:
            self.release(scope, nbytes)


# ------------------------------------------------------------------------------------------------ #
def execute_eviction(
    demand: EvictionDemand,
    index: MetadataIndex,
    policy: EvictionPolicy,
    evict_page: EvictFn,
    rng: random.Random,
) -> int:
    """Evicts pages of the demand's scope until at least `demand.bytes` are freed.

    Partition-local demands follow the eviction policy's order. Demands across children take a
    uniformly random permutation of the scope's pages. If the scope holds fewer bytes than
    demanded, it is emptied.

    Returns:
        int: Bytes freed, as reported by `evict_page`.
    """
    members = sorted(m.page_id for m in index.pages_by_scope(demand.scope))
    if not members:
        return 0
    if demand.mode is EvictionMode.PARTITION_LOCAL:
        scoped = set(members)
        order = policy.victims(len(members), filter=scoped.__contains__)
        # Pages the policy does not track still belong to the scope.
        ordered = set(order)
        order.extend(p for p in members if p not in ordered)
    else:
        order = list(members)
        rng.shuffle(order)

    freed = 0
    evicted = 0
    for page_id in order:
        if freed >= demand.bytes:
            break
        freed += evict_page(page_id)
        evicted += 1
    logger.debug(
        f"Quota eviction at '{demand.scope}' ({demand.mode.value}) freed {freed} bytes "
        f"over {evicted} pages for a demand of {demand.bytes}."
    )
    return freed
