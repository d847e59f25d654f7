#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : Embeddable Local Page Cache                                                         #
# Version    : 0.1.0                                                                               #
# Python     : 3.10.12                                                                             #
# Filename   : /edgecache/admission/rules.py                                                       #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : Enter URL in Workspace Settings                                                     #
# ------------------------------------------------------------------------------------------------ #
# Created    : Wednesday September 16th 2026 11:16:52 am                                           #
# Modified   : Tuesday September 22nd 2026 12:30:30 pm                                             #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Static admission rules.

Rule documents are JSON::

    {
      "databases": [
        {
          "name": "database_foo",
          "tables": [{"name": "table_bar", "maxCachedPartitions": 100}]
        }
      ]
    }

A database or table entry may give a `regex` (full match) instead of a `name`. Anything not
listed is not admitted.
"""
from __future__ import annotations
from dataclasses import dataclass
import logging
import re
from typing import Any, Callable, Optional

from edgecache.data.dataclass import DataClass
from edgecache.exceptions import AdmissionRuleError
from edgecache.index.metadata import Scope, ScopeLevel
from edgecache.service.io import IOService

# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)
# ------------------------------------------------------------------------------------------------ #
DOCUMENT_KEYS = frozenset({"databases"})
DATABASE_KEYS = frozenset({"name", "regex", "tables"})
TABLE_KEYS = frozenset({"name", "regex", "maxCachedPartitions"})


# ------------------------------------------------------------------------------------------------ #
@dataclass(frozen=True)
class NameMatcher(DataClass):
    name: Optional[str] = None
    regex: Optional[str] = None

    def __post_init__(self) -> None:
        if (self.name is None) == (self.regex is None):
            raise AdmissionRuleError("Exactly one of 'name' or 'regex' is required.")
        if self.regex is not None:
            try:
                re.compile(self.regex)
            except re.error as e:
                raise AdmissionRuleError(f"Invalid regex {self.regex!r}: {e}") from e

    @property
    def label(self) -> str:
        return self.name if self.name is not None else f"/{self.regex}/"

    def matches(self, value: str) -> bool:
        if self.name is not None:
            return value == self.name
        return re.fullmatch(self.regex, value) is not None


# ------------------------------------------------------------------------------------------------ #
@dataclass(frozen=True)
class TableRule(DataClass):
    matcher: NameMatcher
    max_cached_partitions: Optional[int] = None


@dataclass(frozen=True)
class DatabaseRule(DataClass):
    matcher: NameMatcher
    tables: tuple[TableRule, ...] = ()

    def lookup(self, table: str) -> Optional[TableRule]:
        return _first_match(self.tables, table)


# ------------------------------------------------------------------------------------------------ #
#                                      ADMISSION RULE SET                                          #
# ------------------------------------------------------------------------------------------------ #
@dataclass(frozen=True)
class AdmissionRuleSet(DataClass):
    databases: tuple[DatabaseRule, ...] = ()

    @classmethod
    def from_document(cls, document: dict) -> AdmissionRuleSet:
        """Parses a rule document.

        Raises:
            AdmissionRuleError: On unknown keys, missing names, invalid caps or a repeated
                (database, table) pair.
        """
        _check_keys(document, DOCUMENT_KEYS, "rule document")
        databases = []
        seen: set[tuple[str, str]] = set()
        for db_doc in document.get("databases", []):
            _check_keys(db_doc, DATABASE_KEYS, "database entry")
            db = NameMatcher(name=db_doc.get("name"), regex=db_doc.get("regex"))
            tables = []
            for table_doc in db_doc.get("tables", []):
                _check_keys(table_doc, TABLE_KEYS, f"table entry of {db.label}")
                table = NameMatcher(name=table_doc.get("name"), regex=table_doc.get("regex"))
                pair = (db.label, table.label)
                if pair in seen:
                    raise _error(f"Duplicate rule for {pair[0]}.{pair[1]}.")
                seen.add(pair)
                cap = table_doc.get("maxCachedPartitions")
                invalid = isinstance(cap, bool) or not isinstance(cap, int) or cap < 1
                if cap is not None and invalid:
                    raise _error(
                        f"maxCachedPartitions for {pair[0]}.{pair[1]} must be a positive integer."
                    )
                tables.append(TableRule(matcher=table, max_cached_partitions=cap))
            databases.append(DatabaseRule(matcher=db, tables=tuple(tables)))
        return cls(databases=tuple(databases))

    @classmethod
    def from_file(cls, filepath: str) -> AdmissionRuleSet:
        return cls.from_document(IOService.read(filepath))

    def lookup(self, database: str, table: str) -> Optional[TableRule]:
        """The rule governing a table, or None when the table is not listed."""
        for db in _ordered(self.databases):
            if db.matcher.matches(database):
                rule = db.lookup(table)
                if rule is not None:
                    return rule
        return None

    def to_document(self) -> dict:
        def entry(matcher: NameMatcher) -> dict:
            return {"name": matcher.name} if matcher.name is not None else {"regex": matcher.regex}

        databases = []
        for db in self.databases:
            tables = []
            for t in db.tables:
                doc = entry(t.matcher)
                if t.max_cached_partitions is not None:
                    doc["maxCachedPartitions"] = t.max_cached_partitions
                tables.append(doc)
            databases.append({**entry(db.matcher), "tables": tables})
        return {"databases": databases}


# ------------------------------------------------------------------------------------------------ #
def admit_static(
    rules: AdmissionRuleSet,
    scope: Scope,
    live_partitions_cached: Callable[[str, str], int],
    partition_cached: Optional[Callable[[Scope], bool]] = None,
) -> bool:
    """Allow-list check with a per-table cap on cached partitions.

    Args:
        rules (AdmissionRuleSet): Parsed rules.
        scope (Scope): Scope of the data, at least (schema, table).
        live_partitions_cached (Callable): Count of partitions of (schema, table) currently cached.
        partition_cached (Callable): Whether the scope's partition already holds pages. Cached
            partitions are always re-admitted.
    """
    if scope.level < ScopeLevel.TABLE:
        logger.debug(f"Scope '{scope}' has no table component; not admitted.")
        return False
    schema, table = scope.path[0], scope.path[1]
    rule = rules.lookup(schema, table)
    if rule is None:
        return False
    if rule.max_cached_partitions is None:
        return True
    if partition_cached is not None and partition_cached(scope):
        return True
    return live_partitions_cached(schema, table) < rule.max_cached_partitions


# ------------------------------------------------------------------------------------------------ #
def _ordered(rules: tuple) -> list:
    # Exact names take precedence over patterns.
    return sorted(rules, key=lambda r: r.matcher.name is None)


def _first_match(rules: tuple, value: str) -> Any:
    for rule in _ordered(rules):
        if rule.matcher.matches(value):
            return rule
    return None


def _check_keys(document: Any, allowed: frozenset, where: str) -> None:
    if not isinstance(document, dict):
        raise _error(f"Expected an object for {where}, got {type(document).__name__}.")
    for key in document:
        if key not in allowed:
            raise _error(f"Unknown key '{key}' in {where}.")


def _error(msg: str) -> AdmissionRuleError:
    logger.error(msg)
    return AdmissionRuleError(msg)
