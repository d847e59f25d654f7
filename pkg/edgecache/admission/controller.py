#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : Embeddable Local Page Cache                                                         #
# Version    : 0.1.0                                                                               #
# Python     : 3.10.12                                                                             #
# Filename   : /edgecache/admission/controller.py                                                  #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : Enter URL in Workspace Settings                                                     #
# ------------------------------------------------------------------------------------------------ #
# Created    : Thursday September 10th 2026 10:02:14 am                                            #
# Modified   : Monday September 14th 2026 10:44:08 am                                              #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Composes static rules and frequency admission into one decision."""
from __future__ import annotations
from dataclasses import dataclass
from enum import Enum
import logging
import os
from typing import Hashable, Optional

from edgecache.admission.ratelimit import (
    DEFAULT_THRESHOLD,
    DEFAULT_WINDOW_MINUTES,
    BucketTimeRateLimit,
)
from edgecache.admission.rules import AdmissionRuleSet, admit_static
from edgecache.data.dataclass import DataClass
from edgecache.exceptions import ConfigurationError
from edgecache.index.metadata import MetadataIndex, Scope

# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)
# ------------------------------------------------------------------------------------------------ #
ADMISSION_KEYS = frozenset({"rules", "rules_file", "rate_limit"})
RATE_LIMIT_KEYS = frozenset({"enabled", "window_minutes", "threshold"})


# ------------------------------------------------------------------------------------------------ #
class AdmissionDecision(str, Enum):
    ACCEPT = "accept"
    REJECT_STATIC = "reject_static"
    REJECT_RATE = "reject_rate"


# ------------------------------------------------------------------------------------------------ #
#                                     ADMISSION CONFIG                                             #
# ------------------------------------------------------------------------------------------------ #
@dataclass(frozen=True)
class AdmissionConfig(DataClass):
    """Admission settings. No rules means the static filter is disabled."""

    rules: Optional[AdmissionRuleSet] = None
    rate_limit_enabled: bool = False
    window_minutes: int = DEFAULT_WINDOW_MINUTES
    threshold: int = DEFAULT_THRESHOLD

    @classmethod
    def from_document(cls, document: Optional[dict], base_dir: str = ".") -> AdmissionConfig:
        if not document:
            return cls()
        _check_keys(document, ADMISSION_KEYS, "admission")
        if "rules" in document and "rules_file" in document:
            raise ConfigurationError("admission: give either 'rules' or 'rules_file', not both.")
        rules = None
        if document.get("rules") is not None:
            rules = AdmissionRuleSet.from_document(document["rules"])
        elif document.get("rules_file"):
            rules = AdmissionRuleSet.from_file(os.path.join(base_dir, document["rules_file"]))

        rate = document.get("rate_limit") or {}
        _check_keys(rate, RATE_LIMIT_KEYS, "admission.rate_limit")
        config = cls(
            rules=rules,
            rate_limit_enabled=bool(rate.get("enabled", bool(rate))),
            window_minutes=int(rate.get("window_minutes", DEFAULT_WINDOW_MINUTES)),
            threshold=int(rate.get("threshold", DEFAULT_THRESHOLD)),
        )
        if config.window_minutes < 1 or config.threshold < 1:
            raise ConfigurationError(
                "admission.rate_limit window_minutes and threshold must be positive."
            )
        return config

    def to_document(self) -> dict:
        document: dict = {}
        if self.rules is not None:
            document["rules"] = self.rules.to_document()
        if self.rate_limit_enabled:
            document["rate_limit"] = {
                "window_minutes": self.window_minutes,
                "threshold": self.threshold,
            }
        return document


# ------------------------------------------------------------------------------------------------ #
#                                   ADMISSION CONTROLLER                                           #
# ------------------------------------------------------------------------------------------------ #
class AdmissionController:
    """Effective admission = static rules (when configured) AND frequency test (when enabled).

    The static filter runs first; the frequency limiter only counts requests that pass it.
    """

    def __init__(
        self,
        rules: Optional[AdmissionRuleSet] = None,
        rate_limit: Optional[BucketTimeRateLimit] = None,
    ) -> None:
        self._rules = rules
        self._rate_limit = rate_limit

    @classmethod
    def from_config(cls, config: AdmissionConfig) -> AdmissionController:
        rate_limit = None
        if config.rate_limit_enabled:
            rate_limit = BucketTimeRateLimit(
                window_minutes=config.window_minutes, threshold=config.threshold
            )
        return cls(rules=config.rules, rate_limit=rate_limit)

    @property
    def rules(self) -> Optional[AdmissionRuleSet]:
        return self._rules

    @property
    def rate_limit(self) -> Optional[BucketTimeRateLimit]:
        return self._rate_limit

    @property
    def accepts_all(self) -> bool:
        return self._rules is None and self._rate_limit is None

    def decide(
        self, scope: Scope, key: Hashable, now: float, index: MetadataIndex
    ) -> AdmissionDecision:
        """Decides whether data of `key` under `scope` may be cached.

        Partition counts for the static cap come from the index, so evicting the last page of a
        partition frees its slot.
        """
        if self._rules is not None:
            admitted = admit_static(
                self._rules,
                scope,
                live_partitions_cached=index.partitions_cached,
                partition_cached=lambda s: index.page_count(s) > 0,
            )
            if not admitted:
                return AdmissionDecision.REJECT_STATIC
        if self._rate_limit is not None:
            self._rate_limit.record_access(key, now)
            if not self._rate_limit.should_admit(key, now):
                return AdmissionDecision.REJECT_RATE
        return AdmissionDecision.ACCEPT


# ------------------------------------------------------------------------------------------------ #
def _check_keys(document: object, allowed: frozenset, where: str) -> None:
    if not isinstance(document, dict):
        raise ConfigurationError(f"Expected an object for {where}.")
    unknown = sorted(set(document) - allowed)
    if unknown:
        msg = f"Unknown key '{unknown[0]}' in {where}."
        logger.error(msg)
        raise ConfigurationError(msg)
