#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : Embeddable Local Page Cache                                                         #
# Version    : 0.1.0                                                                               #
# Python     : 3.10.12                                                                             #
# Filename   : /edgecache/cache/config.py                                                          #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : Enter URL in Workspace Settings                                                     #
# ------------------------------------------------------------------------------------------------ #
# Created    : Thursday October 1st 2026 02:21:27 pm                                               #
# Modified   : Monday October 5th 2026 04:55:25 pm                                                 #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Cache configuration document."""
from __future__ import annotations
from dataclasses import dataclass, field, replace
import logging
import os
from typing import Any, Optional

from edgecache.admission.controller import AdmissionConfig
from edgecache.data.dataclass import DataClass
from edgecache.eviction.policy import EvictionPolicyName
from edgecache.exceptions import AdmissionRuleError, ConfigurationError
from edgecache.quota.manager import QuotaRule
from edgecache.service.io import IOService
from edgecache.store.page import DEFAULT_BUCKET_COUNT, DEFAULT_PAGE_SIZE, StoreLayout

# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)
# ------------------------------------------------------------------------------------------------ #
CONFIG_KEYS = frozenset(
    {
        "page_size_bytes",
        "bucket_count",
        "dirs",
        "eviction_policy",
        "seed",
        "read_timeout_ms",
        "remote_timeout_ms",
        "default_ttl_s",
        "ttl_sweep_period_s",
        "disk_full_evict_fraction",
        "timeout_evict_threshold",
        "checksums",
        "quotas",
        "admission",
    }
)
DIR_KEYS = frozenset({"path", "capacity_bytes"})


# ------------------------------------------------------------------------------------------------ #
@dataclass(frozen=True)
class DirConfig(DataClass):
    path: str
    capacity_bytes: int


# ------------------------------------------------------------------------------------------------ #
#                                        CACHE CONFIG                                              #
# ------------------------------------------------------------------------------------------------ #
@dataclass(frozen=True)
class CacheConfig(DataClass):
    """Settings of one cache instance.

    Every constraint is checked on construction and reported as a ConfigurationError naming
    the offending key.
    """

    dirs: tuple[DirConfig, ...]
    page_size_bytes: int = DEFAULT_PAGE_SIZE
    bucket_count: int = DEFAULT_BUCKET_COUNT
    eviction_policy: EvictionPolicyName = EvictionPolicyName.LRU
    seed: int = 0
    read_timeout_ms: int = 10_000
    remote_timeout_ms: int = 30_000
    default_ttl_s: Optional[float] = None
    ttl_sweep_period_s: float = 60.0
    disk_full_evict_fraction: float = 0.05
    timeout_evict_threshold: int = 3
    checksums: bool = False
    quotas: tuple[QuotaRule, ...] = ()
    admission: AdmissionConfig = field(default_factory=AdmissionConfig)

    def __post_init__(self) -> None:
        if not self.dirs:
            self._fail("dirs", "at least one cache directory is required")
        for d in self.dirs:
            if d.capacity_bytes < 1:
                self._fail("dirs", f"capacity of {d.path} must be positive")
        if len({os.path.abspath(d.path) for d in self.dirs}) != len(self.dirs):
            self._fail("dirs", "cache directories must be distinct")
        if self.page_size_bytes < 1:
            self._fail("page_size_bytes", "must be positive")
        if self.bucket_count < 1:
            self._fail("bucket_count", "must be positive")
        if self.read_timeout_ms <= 0:
            self._fail("read_timeout_ms", "must be positive")
        if self.remote_timeout_ms <= 0:
            self._fail("remote_timeout_ms", "must be positive")
        if self.default_ttl_s is not None and self.default_ttl_s <= 0:
            self._fail("default_ttl_s", "must be positive when given")
        if self.ttl_sweep_period_s <= 0:
            self._fail("ttl_sweep_period_s", "must be positive")
        if not 0 < self.disk_full_evict_fraction <= 1:
            self._fail("disk_full_evict_fraction", "must lie in (0, 1]")
        if self.timeout_evict_threshold < 1:
            self._fail("timeout_evict_threshold", "must be positive")
        scopes = [q.scope for q in self.quotas]
        if len(set(scopes)) != len(scopes):
            self._fail("quotas", "at most one rule per scope")

    # -------------------------------------------------------------------------------------------- #
    @property
    def layouts(self) -> tuple[StoreLayout, ...]:
        return tuple(
            StoreLayout(
                root=d.path,
                page_size=self.page_size_bytes,
                bucket_count=self.bucket_count,
                per_dir_capacity=d.capacity_bytes,
            )
            for d in self.dirs
        )

    @property
    def capacities(self) -> tuple[int, ...]:
        return tuple(d.capacity_bytes for d in self.dirs)

    @property
    def total_capacity(self) -> int:
        return sum(self.capacities)

    @property
    def read_timeout_s(self) -> float:
        return self.read_timeout_ms / 1000

    @property
    def remote_timeout_s(self) -> float:
        return self.remote_timeout_ms / 1000

    def with_overrides(self, **changes: Any) -> CacheConfig:
        return replace(self, **changes)

    # -------------------------------------------------------------------------------------------- #
    @classmethod
    def from_document(cls, document: dict, base_dir: str = ".") -> CacheConfig:
        """Builds a config from its document form. Relative paths resolve against base_dir."""
        if not isinstance(document, dict):
            raise ConfigurationError("The cache configuration must be a mapping.")
        unknown = sorted(set(document) - CONFIG_KEYS)
        if unknown:
            cls._fail(unknown[0], "unknown key")

        dirs = []
        for entry in document.get("dirs") or []:
            if not isinstance(entry, dict) or set(entry) - DIR_KEYS or "path" not in entry:
                cls._fail("dirs", f"entry {entry!r} must be {{path, capacity_bytes}}")
            path = entry["path"]
            if not os.path.isabs(path):
                path = os.path.join(base_dir, path)
            dirs.append(DirConfig(path=path, capacity_bytes=_int(entry, "capacity_bytes")))

        try:
            policy = EvictionPolicyName(str(document.get("eviction_policy", "lru")).lower())
        except ValueError:
            cls._fail("eviction_policy", "expected one of lru, fifo, random")

        try:
            quotas = tuple(QuotaRule.from_document(q) for q in document.get("quotas") or [])
            admission = AdmissionConfig.from_document(document.get("admission"), base_dir=base_dir)
        except AdmissionRuleError as e:
            raise ConfigurationError(f"admission: {e}") from e
        except (TypeError, AttributeError) as e:
            raise ConfigurationError(f"quotas/admission: {e}") from e

        ttl = document.get("default_ttl_s")
        return cls(
            dirs=tuple(dirs),
            page_size_bytes=_int(document, "page_size_bytes", DEFAULT_PAGE_SIZE),
            bucket_count=_int(document, "bucket_count", DEFAULT_BUCKET_COUNT),
            eviction_policy=policy,
            seed=_int(document, "seed", 0),
            read_timeout_ms=_int(document, "read_timeout_ms", 10_000),
            remote_timeout_ms=_int(document, "remote_timeout_ms", 30_000),
            default_ttl_s=None if ttl is None else _float(document, "default_ttl_s"),
            ttl_sweep_period_s=_float(document, "ttl_sweep_period_s", 60.0),
            disk_full_evict_fraction=_float(document, "disk_full_evict_fraction", 0.05),
            timeout_evict_threshold=_int(document, "timeout_evict_threshold", 3),
            checksums=bool(document.get("checksums", False)),
            quotas=quotas,
            admission=admission,
        )

    @classmethod
    def from_file(cls, filepath: str) -> CacheConfig:
        """Reads a YAML or JSON configuration document."""
        document = IOService.read(filepath)
        return cls.from_document(document, base_dir=os.path.dirname(os.path.abspath(filepath)))

    def to_document(self) -> dict:
        document = {
            "page_size_bytes": self.page_size_bytes,
            "bucket_count": self.bucket_count,
            "dirs": [d.as_dict() for d in self.dirs],
            "eviction_policy": self.eviction_policy.value,
            "seed": self.seed,
            "read_timeout_ms": self.read_timeout_ms,
            "remote_timeout_ms": self.remote_timeout_ms,
            "ttl_sweep_period_s": self.ttl_sweep_period_s,
            "disk_full_evict_fraction": self.disk_full_evict_fraction,
            "timeout_evict_threshold": self.timeout_evict_threshold,
            "checksums": self.checksums,
            "quotas": [q.to_document() for q in self.quotas],
            "admission": self.admission.to_document(),
        }
        if self.default_ttl_s is not None:
            document["default_ttl_s"] = self.default_ttl_s
        return document

    @staticmethod
    def _fail(key: str, reason: str) -> None:
        msg = f"Invalid cache configuration '{key}': {reason}."
        logger.error(msg)
        raise ConfigurationError(msg)


# ------------------------------------------------------------------------------------------------ #
def _int(document: dict, key: str, default: Optional[int] = None) -> int:
    value = document.get(key, default)
    if isinstance(value, bool) or value is None:
        CacheConfig._fail(key, f"expected an integer, got {value!r}")
    try:
        return int(value)
    except (TypeError, ValueError):
        CacheConfig._fail(key, f"expected an integer, got {value!r}")


def _float(document: dict, key: str, default: Optional[float] = None) -> float:
    value = document.get(key, default)
    try:
        return float(value)
    except (TypeError, ValueError):
        CacheConfig._fail(key, f"expected a number, got {value!r}")
