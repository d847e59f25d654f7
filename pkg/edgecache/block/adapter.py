#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : Embeddable Local Page Cache                                                         #
# Version    : 0.1.0                                                                               #
# Python     : 3.10.12                                                                             #
# Filename   : /edgecache/block/adapter.py                                                         #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : Enter URL in Workspace Settings                                                     #
# ------------------------------------------------------------------------------------------------ #
# Created    : Tuesday September 22nd 2026 12:30:30 pm                                             #
# Modified   : Wednesday September 23rd 2026 02:16:52 pm                                           #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Block cache for a distributed file system data node.

A cache entry is a block's bytes (as pages) plus its checksum metadata, keyed by block id and
generation stamp. Entries are staged under a private directory and published with a single
directory rename, so a reader finds both parts or neither. Appending to a block yields a new
generation stamp and therefore a new entry; readers of the old generation are unaffected.

The block-to-entry mapping is in memory only. A restart wipes the cached blocks.
"""
from __future__ import annotations
from collections import OrderedDict, defaultdict
from contextlib import contextmanager
from dataclasses import dataclass
import errno
import logging
import math
import os
from pathlib import Path
import shutil
import threading
import time
from typing import Callable, Iterator, Optional
import uuid

import crc32c

from edgecache.admission.ratelimit import BucketTimeRateLimit
from edgecache.data.dataclass import DataClass
from edgecache.exceptions import (
    CorruptedPageError,
    DiskFullError,
    InvalidRangeError,
    PageNotFoundError,
    PartialWriteRolledBackError,
)
from edgecache.index.metadata import Scope
from edgecache.metrics.registry import ErrorClass, MetricEvent, MetricKind, MetricsRegistry, Op
from edgecache.store.page import PageId, PageStore, StoreLayout, file_id_for

# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)
# ------------------------------------------------------------------------------------------------ #
CHECKSUM_CHUNK = 512
CHECKSUM_WIDTH = 4
META_NAME = "meta"
STAGING_DIR = ".staging"


# ------------------------------------------------------------------------------------------------ #
def checksum_meta(block_bytes: bytes, chunk_size: int = CHECKSUM_CHUNK) -> bytes:
    """CRC32C of every chunk of the block, big-endian, concatenated."""
    return b"".join(
        crc32c.crc32c(block_bytes[i : i + chunk_size]).to_bytes(CHECKSUM_WIDTH, "big")
        for i in range(0, len(block_bytes), chunk_size)
    )


# ------------------------------------------------------------------------------------------------ #
@dataclass(frozen=True, order=True)
class BlockKey:
    block_id: str
    generation_stamp: int

    def __post_init__(self) -> None:
        if self.generation_stamp < 0:
            raise ValueError(f"Generation stamp must be non-negative, got {self.generation_stamp}.")

    @property
    def cache_id(self) -> str:
        return file_id_for(f"blk_{self.block_id}", self.generation_stamp)


@dataclass(frozen=True)
class BlockEntry(DataClass):
    key: BlockKey
    cache_id: str
    file_length: int


# ------------------------------------------------------------------------------------------------ #
#                                         BLOCK CACHE                                              #
# ------------------------------------------------------------------------------------------------ #
class BlockCache:
    """Caches finalized blocks with their checksum metadata.

    Args:
        layout (StoreLayout): Page layout of the cache root.
        rate_limit (BucketTimeRateLimit): Frequency admission for `should_cache`. None admits
            every block.
        capacity_bytes (int): Bound on cached block bytes, enforced by evicting the least
            recently read entries. None is unbounded.
        purge_superseded (bool): Remove older generations of a block once a newer one is cached.
        metrics (MetricsRegistry): Receives block cache events.
    """

    def __init__(
        self,
        layout: StoreLayout,
        rate_limit: Optional[BucketTimeRateLimit] = None,
        capacity_bytes: Optional[int] = None,
        purge_superseded: bool = False,
        metrics: Optional[MetricsRegistry] = None,
        clock: Callable[[], float] = time.time,
    ) -> None:
        self._store = PageStore(layout)
        self._layout = layout
        self._rate_limit = rate_limit
        self._capacity = capacity_bytes
        self._purge_superseded = purge_superseded
        self._metrics = metrics if metrics is not None else MetricsRegistry()
        self._clock = clock
        self._entries: OrderedDict[BlockKey, BlockEntry] = OrderedDict()
        self._generations: dict[str, set[int]] = defaultdict(set)
        self._lock = threading.RLock()
        self._key_locks: dict[BlockKey, tuple[threading.Lock, int]] = {}
        self._logger = logging.getLogger(f"{self.__class__.__name__}")
        self.on_restart()

    # -------------------------------------------------------------------------------------------- #
    @property
    def layout(self) -> StoreLayout:
        return self._layout

    @property
    def staging_dir(self) -> Path:
        return Path(self._layout.root) / STAGING_DIR

    @property
    def mapping(self) -> dict[str, tuple[str, int]]:
        """Latest cached generation of each block as block id -> (cache id, file length)."""
        with self._lock:
            mapping = {}
            for block_id, generations in self._generations.items():
                entry = self._entries[BlockKey(block_id, max(generations))]
                mapping[block_id] = (entry.cache_id, entry.file_length)
            return mapping

    @property
    def used_bytes(self) -> int:
        with self._lock:
            return sum(e.file_length for e in self._entries.values())

    def is_cached(self, key: BlockKey) -> bool:
        return key in self._entries

    def entry_dir(self, key: BlockKey) -> Path:
        return self._layout.file_dir(key.cache_id)

    # -------------------------------------------------------------------------------------------- #
    def should_cache(self, block_id: str, now: Optional[float] = None) -> bool:
        """Records an access of the block and reports whether it is hot enough to cache."""
        if self._rate_limit is None:
            return True
        now = self._clock() if now is None else now
        self._rate_limit.record_access(block_id, now)
        admitted = self._rate_limit.should_admit(block_id, now)
        if not admitted:
            self._record(MetricKind.ADMIT_REJECT_RATE)
        return admitted

    def cache_block(self, key: BlockKey, block_bytes: bytes, meta_bytes: bytes) -> None:
        """Stores a finalized block and its metadata as one entry.

        Raises:
            DiskFullError: The device ran out of space. Nothing was published.
            PartialWriteRolledBackError: Another write failure. Nothing was published.
        """
        with self._key_lock(key):
            if self.is_cached(key):
                return
            self._make_room(len(block_bytes))
            staged = self.staging_dir / f"{key.cache_id}.{uuid.uuid4().hex}"
            try:
                staged.mkdir(parents=True)
                page_size = self._layout.page_size
                for index, start in enumerate(range(0, len(block_bytes), page_size)):
                    self._write_staged(staged / str(index), block_bytes[start : start + page_size])
                self._write_staged(staged / META_NAME, meta_bytes)
                target = self.entry_dir(key)
                target.parent.mkdir(parents=True, exist_ok=True)
                if target.exists():
                    shutil.rmtree(target)
                os.rename(staged, target)
            except OSError as e:
                shutil.rmtree(staged, ignore_errors=True)
                if e.errno == errno.ENOSPC:
                    msg = f"No space left on device caching block {key}."
                    self._logger.warning(msg)
                    self._record_error(ErrorClass.DISK_FULL, Op.PUT)
                    raise DiskFullError(errno.ENOSPC, msg) from e
                msg = f"Caching block {key} failed and was rolled back: {e}"
                self._logger.warning(msg)
                self._record_error(ErrorClass.IO, Op.PUT)
                raise PartialWriteRolledBackError(msg) from e

            with self._lock:
                self._entries[key] = BlockEntry(
                    key=key, cache_id=key.cache_id, file_length=len(block_bytes)
                )
                self._generations[key.block_id].add(key.generation_stamp)
                superseded = [
                    BlockKey(key.block_id, g)
                    for g in self._generations[key.block_id]
                    if g < key.generation_stamp
                ]
        self._record(MetricKind.MISS_CACHED, op=Op.PUT, nbytes=len(block_bytes))
        if self._purge_superseded:
            for old in superseded:
                self._drop(old)

    def read_block(self, key: BlockKey, offset: int, length: int) -> Optional[bytes]:
        """Serves a range of a cached block, or None when the exact key is not cached.

        Every 512-byte chunk overlapping the range is verified against the metadata. A mismatch
        evicts the entry and reports a miss.
        """
        entry = self._entries.get(key)
        if entry is None:
            self._record(MetricKind.MISS_BYPASSED, nbytes=length)
            return None
        if offset < 0 or length < 1 or offset + length > entry.file_length:
            msg = f"Range [{offset}, {offset + length}) outside block {key} of {entry.file_length}."
            self._logger.error(msg)
            raise InvalidRangeError(msg)

        first = offset // CHECKSUM_CHUNK
        last = (offset + length - 1) // CHECKSUM_CHUNK
        start = first * CHECKSUM_CHUNK
        end = min((last + 1) * CHECKSUM_CHUNK, entry.file_length)
        try:
            meta = (self.entry_dir(key) / META_NAME).read_bytes()
            data = self._read_range(entry, start, end - start)
            expected = meta[first * CHECKSUM_WIDTH : (last + 1) * CHECKSUM_WIDTH]
            if checksum_meta(data) != expected:
                raise CorruptedPageError(f"Checksum mismatch in block {key}.")
        except CorruptedPageError as e:
            self._logger.warning(str(e))
            self._record_error(ErrorClass.CORRUPTED, Op.GET)
            self._drop(key)
            return None
        except (FileNotFoundError, PageNotFoundError):
            # Deleted or wiped after the lookup.
            self._record(MetricKind.MISS_BYPASSED, nbytes=length)
            return None

        with self._lock:
            if key in self._entries:
                self._entries.move_to_end(key)
        self._record(MetricKind.HIT, nbytes=length)
        return data[offset - start : offset - start + length]

    def read_meta(self, key: BlockKey) -> Optional[bytes]:
        if key not in self._entries:
            return None
        try:
            return (self.entry_dir(key) / META_NAME).read_bytes()
        except FileNotFoundError:
            return None

    # -------------------------------------------------------------------------------------------- #
    def delete_block(self, block_id: str) -> int:
        """Removes every cached generation of a block. Returns the page files removed."""
        with self._lock:
            generations = sorted(self._generations.get(block_id, ()))
        removed = sum(self._drop(BlockKey(block_id, g), op=Op.DELETE) for g in generations)
        if generations:
            self._logger.debug(f"Deleted block {block_id}: {removed} pages.")
        return removed

    def on_restart(self) -> None:
        """Removes all cached blocks and forgets every mapping."""
        with self._lock:
            self._store.wipe()
            shutil.rmtree(self.staging_dir, ignore_errors=True)
            self._entries.clear()
            self._generations.clear()
        self._logger.info(f"Block cache at {self._layout.root} cleared.")

    def close(self) -> None:
        self._store.close()

    # -------------------------------------------------------------------------------------------- #
    def _read_range(self, entry: BlockEntry, offset: int, length: int) -> bytes:
        page_size = self._layout.page_size
        chunks = []
        position = offset
        while position < offset + length:
            index = position // page_size
            lo = position - index * page_size
            n = min(page_size - lo, offset + length - position)
            chunks.append(self._store.read_page(PageId(entry.cache_id, index), lo, n))
            position += n
        return b"".join(chunks)

    def _drop(self, key: BlockKey, op: Op = Op.DELETE) -> int:
        with self._key_lock(key):
            with self._lock:
                entry = self._entries.pop(key, None)
                if entry is None:
                    return 0
                generations = self._generations.get(key.block_id)
                if generations is not None:
                    generations.discard(key.generation_stamp)
                    if not generations:
                        del self._generations[key.block_id]
            pages = math.ceil(entry.file_length / self._layout.page_size)
            removed = sum(
                self._store.delete_page(PageId(entry.cache_id, i)) for i in range(pages)
            )
            shutil.rmtree(self.entry_dir(key), ignore_errors=True)
        self._record(MetricKind.EVICT, op=op, nbytes=entry.file_length)
        return removed

    @contextmanager
    def _key_lock(self, key: BlockKey) -> Iterator[None]:
        """Serializes publishing and dropping of one entry. Locks live while in use."""
        with self._lock:
            lock, users = self._key_locks.get(key, (threading.Lock(), 0))
            self._key_locks[key] = (lock, users + 1)
        try:
            with lock:
                yield
        finally:
            with self._lock:
                lock, users = self._key_locks[key]
                if users == 1:
                    del self._key_locks[key]
                else:
                    self._key_locks[key] = (lock, users - 1)

    def _make_room(self, incoming: int) -> None:
        if self._capacity is None:
            return
        while True:
            with self._lock:
                if not self._entries or self.used_bytes + incoming <= self._capacity:
                    return
                victim = next(iter(self._entries))
            self._drop(victim)

    def _write_staged(self, path: Path, data: bytes) -> None:
        with open(path, "wb") as f:
            f.write(data)

    def _record(self, kind: MetricKind, op: Op = Op.GET, nbytes: int = 0) -> None:
        self._metrics.record(MetricEvent(kind=kind, op=op, scope=Scope.global_(), bytes=nbytes))

    def _record_error(self, error_class: ErrorClass, op: Op) -> None:
        self._metrics.record(MetricEvent(kind=MetricKind.ERROR, op=op, error_class=error_class))
