#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : Embeddable Local Page Cache                                                         #
# Version    : 0.1.0                                                                               #
# Python     : 3.10.12                                                                             #
# Filename   : /edgecache/index/metadata.py                                                        #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : Enter URL in Workspace Settings                                                     #
# ------------------------------------------------------------------------------------------------ #
# Created    : Friday September 18th 2026 07:54:18 pm                                              #
# Modified   : Thursday September 24th 2026 12:52:04 pm                                            #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""In-memory registry of page metadata.

Pages live in a universe keyed by page id, with incrementally maintained subsets keyed by
file id, storage directory and most-specific scope. Ancestor-scope queries walk a per-scope
child set instead of storing each page in every ancestor set, and per-scope byte and page
counters make `usage` constant time.
"""
from __future__ import annotations
from collections import defaultdict
from dataclasses import dataclass, field
from enum import IntEnum
import logging
import threading
from typing import Iterator, Optional

from edgecache.exceptions import DuplicatePageError
from edgecache.store.page import PageId

# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)
# ------------------------------------------------------------------------------------------------ #
MAX_SCOPE_DEPTH = 3


# ------------------------------------------------------------------------------------------------ #
class ScopeLevel(IntEnum):
    GLOBAL = 0
    SCHEMA = 1
    TABLE = 2
    PARTITION = 3


# ------------------------------------------------------------------------------------------------ #
#                                            SCOPE                                                 #
# ------------------------------------------------------------------------------------------------ #
@dataclass(frozen=True, order=True)
class Scope:
    """Hierarchical tenant path: (), (schema,), (schema, table) or (schema, table, partition)."""

    path: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not isinstance(self.path, tuple):
            object.__setattr__(self, "path", tuple(self.path))
        if len(self.path) > MAX_SCOPE_DEPTH:
            raise ValueError(f"Scope depth {len(self.path)} exceeds {MAX_SCOPE_DEPTH}.")
        for part in self.path:
            if not part or "." in part:
                raise ValueError(f"Invalid scope component {part!r} in {self.path}.")

    @classmethod
    def global_(cls) -> Scope:
        return cls(())

    @classmethod
    def of(cls, *parts: str) -> Scope:
        return cls(tuple(parts))

    @classmethod
    def parse(cls, text: Optional[str]) -> Scope:
        """Parses 'schema[.table[.partition]]'; the empty string is the global scope."""
        if text is None or text == "":
            return cls.global_()
        return cls(tuple(text.split(".")))

    @property
    def level(self) -> ScopeLevel:
        return ScopeLevel(len(self.path))

    @property
    def is_global(self) -> bool:
        return not self.path

    @property
    def parent(self) -> Optional[Scope]:
        return Scope(self.path[:-1]) if self.path else None

    def lineage(self) -> list[Scope]:
        """This scope followed by each ancestor, ending with the global scope."""
        return [Scope(self.path[:i]) for i in range(len(self.path), -1, -1)]

    def is_ancestor_of(self, other: Scope) -> bool:
        """True iff this path is a strict prefix of the other."""
        return len(self.path) < len(other.path) and other.path[: len(self.path)] == self.path

    def contains(self, other: Scope) -> bool:
        return self == other or self.is_ancestor_of(other)

    def truncate(self, level: int) -> Scope:
        return Scope(self.path[: int(level)])

    def __str__(self) -> str:
        return ".".join(self.path)


# ------------------------------------------------------------------------------------------------ #
#                                         PAGE METADATA                                            #
# ------------------------------------------------------------------------------------------------ #
@dataclass(eq=False)
class PageMetadata:
    page_id: PageId
    length: int
    scope: Scope = field(default_factory=Scope.global_)
    dir: int = 0
    created_at: float = 0.0
    last_access_at: Optional[float] = None
    ttl: Optional[float] = None

    def __post_init__(self) -> None:
        if self.length < 1:
            raise ValueError(f"Page {self.page_id} length must be at least 1, got {self.length}.")
        if self.last_access_at is None or self.last_access_at < self.created_at:
            self.last_access_at = self.created_at

    @property
    def expires_at(self) -> Optional[float]:
        return None if self.ttl is None else self.created_at + self.ttl

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PageMetadata) and other.page_id == self.page_id

    def __hash__(self) -> int:
        return hash(self.page_id)


# ------------------------------------------------------------------------------------------------ #
#                                        METADATA INDEX                                            #
# ------------------------------------------------------------------------------------------------ #
class MetadataIndex:
    """Universe of page metadata plus indexed subsets by file, directory and scope.

    Mutations and queries take a short exclusive section; no I/O happens under it. Bulk queries
    return a snapshot set that later mutations do not affect.
    """

    def __init__(self) -> None:
        self._lock = threading.RLock()
        self._universe: dict[PageId, PageMetadata] = {}
        self._by_file: dict[str, dict[PageId, PageMetadata]] = defaultdict(dict)
        self._by_dir: dict[int, dict[PageId, PageMetadata]] = defaultdict(dict)
        self._by_scope: dict[Scope, dict[PageId, PageMetadata]] = defaultdict(dict)
        self._children: dict[Scope, set[Scope]] = defaultdict(set)
        self._scope_bytes: dict[Scope, int] = defaultdict(int)
        self._scope_pages: dict[Scope, int] = defaultdict(int)
        self._dir_bytes: dict[int, int] = defaultdict(int)

    # -------------------------------------------------------------------------------------------- #
    def add(self, meta: PageMetadata) -> None:
        """Registers a page in the universe and every index.

        Raises:
            DuplicatePageError: If the page id is already present.
        """
        with self._lock:
            if meta.page_id in self._universe:
                msg = f"Page {meta.page_id} is already indexed."
                logger.error(msg)
                raise DuplicatePageError(msg)
            self._universe[meta.page_id] = meta
            self._by_file[meta.page_id.file_id][meta.page_id] = meta
            self._by_dir[meta.dir][meta.page_id] = meta
            self._by_scope[meta.scope][meta.page_id] = meta
            self._dir_bytes[meta.dir] += meta.length
            child = None
            for scope in meta.scope.lineage():
                self._scope_bytes[scope] += meta.length
                self._scope_pages[scope] += 1
                if child is not None:
                    self._children[scope].add(child)
                child = scope

    def remove(self, page_id: PageId) -> Optional[PageMetadata]:
        """Removes a page from the universe and every index. Returns it, or None if absent."""
        with self._lock:
            meta = self._universe.pop(page_id, None)
            if meta is None:
                return None
            self._discard(self._by_file, page_id.file_id, page_id)
            self._discard(self._by_dir, meta.dir, page_id)
            self._discard(self._by_scope, meta.scope, page_id)
            self._dir_bytes[meta.dir] -= meta.length
            if self._dir_bytes[meta.dir] == 0:
                del self._dir_bytes[meta.dir]
            for scope in meta.scope.lineage():
                self._scope_bytes[scope] -= meta.length
                self._scope_pages[scope] -= 1
                if self._scope_pages[scope] == 0:
                    del self._scope_pages[scope]
                    del self._scope_bytes[scope]
                    self._children.pop(scope, None)
                    if scope.parent is not None:
                        self._children[scope.parent].discard(scope)
            return meta

    def get(self, page_id: PageId) -> Optional[PageMetadata]:
        return self._universe.get(page_id)

    def touch(self, page_id: PageId, now: float) -> None:
        """Advances last_access_at of a page; a no-op for absent pages."""
        with self._lock:
            meta = self._universe.get(page_id)
            if meta is not None and now > meta.last_access_at:
                meta.last_access_at = now

    # -------------------------------------------------------------------------------------------- #
    def pages_by_scope(self, scope: Scope) -> set[PageMetadata]:
        """Pages whose most-specific scope has `scope` as a non-strict prefix."""
        with self._lock:
            if scope.is_global:
                return set(self._universe.values())
            pages: set[PageMetadata] = set()
            pending = [scope]
            while pending:
                current = pending.pop()
                pages.update(self._by_scope.get(current, {}).values())
                pending.extend(self._children.get(current, ()))
            return pages

    def pages_by_file(self, file_id: str) -> set[PageMetadata]:
        with self._lock:
            return set(self._by_file.get(file_id, {}).values())

    def pages_by_dir(self, dir: int) -> set[PageMetadata]:
        with self._lock:
            return set(self._by_dir.get(dir, {}).values())

    def usage(self, scope: Scope) -> int:
        """Bytes cached under the scope, including all descendant scopes."""
        return self._scope_bytes.get(scope, 0)

    def page_count(self, scope: Scope) -> int:
        return self._scope_pages.get(scope, 0)

    def usage_by_dir(self, dir: int) -> int:
        return self._dir_bytes.get(dir, 0)

    def child_scopes(self, scope: Scope) -> set[Scope]:
        """Immediate child scopes that currently hold at least one page."""
        with self._lock:
            return set(self._children.get(scope, ()))

    def partitions_cached(self, schema: str, table: str) -> int:
        """Number of partitions of a table currently holding pages."""
        with self._lock:
            return len(self._children.get(Scope.of(schema, table), ()))

    def file_ids(self) -> set[str]:
        with self._lock:
            return set(self._by_file)

    def dirs(self) -> set[int]:
        with self._lock:
            return set(self._by_dir)

    # -------------------------------------------------------------------------------------------- #
    def __contains__(self, page_id: object) -> bool:
        return page_id in self._universe

    def __len__(self) -> int:
        return len(self._universe)

    def __iter__(self) -> Iterator[PageMetadata]:
        with self._lock:
            return iter(list(self._universe.values()))

    @staticmethod
    def _discard(subsets: dict, key: object, page_id: PageId) -> None:
        members = subsets.get(key)
        if members is None:
            return
        members.pop(page_id, None)
        if not members:
            del subsets[key]
