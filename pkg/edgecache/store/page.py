#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : Embeddable Local Page Cache                                                         #
# Version    : 0.1.0                                                                               #
# Python     : 3.10.12                                                                             #
# Filename   : /edgecache/store/page.py                                                            #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : Enter URL in Workspace Settings                                                     #
# ------------------------------------------------------------------------------------------------ #
# Created    : Tuesday September 8th 2026 02:04:28 pm                                              #
# Modified   : Thursday September 10th 2026 09:42:54 am                                            #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Page store: pages persisted as individual files under a self-describing directory layout.

On-disk format v1::

    <root>/page_size=<bytes>/bucket_<b>/<file_id>/<page_index>

The page file holds the raw page bytes and nothing else. Everything needed to rebuild the
page metadata (file id, page index, length, page size) is recoverable from the path and the
file size, which is what `PageStore.restore` relies on after a restart.
"""
from __future__ import annotations
from concurrent.futures import ThreadPoolExecutor
import concurrent.futures
from dataclasses import dataclass, field
import errno
import hashlib
import logging
import os
from pathlib import Path
import re
import shutil
import threading
import time
from typing import Callable, Optional
import uuid

import crc32c

from edgecache.data.dataclass import DataClass
from edgecache.exceptions import (
    CorruptedPageError,
    DiskFullError,
    InvalidRangeError,
    PageNotFoundError,
    PageReadTimeoutError,
    PageSizeMismatchError,
)

# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)
# ------------------------------------------------------------------------------------------------ #
FORMAT_VERSION = 1
DEFAULT_PAGE_SIZE = 1_048_576
DEFAULT_BUCKET_COUNT = 1_000
PAGE_SIZE_PREFIX = "page_size="
BUCKET_PREFIX = "bucket_"
CHECKSUM_SUFFIX = ".crc"
TEMP_SUFFIX = ".tmp"
# Leaf names that live next to pages but are not pages.
SIDECAR_NAMES = frozenset({"meta"})
_DECIMAL = re.compile(r"0|[1-9][0-9]*")
_BUCKET = re.compile(r"bucket_(0|[1-9][0-9]*)")


# ------------------------------------------------------------------------------------------------ #
def stable_hash(key: str) -> int:
    """Process-independent 64-bit hash of a string."""
    return int.from_bytes(hashlib.md5(key.encode("utf-8")).digest()[:8], "big")


def file_id_for(path: str, version: object) -> str:
    """Derives the cache file id from the full path and a version token (e.g. mtime)."""
    return hashlib.md5(f"{path}\x00{version}".encode("utf-8")).hexdigest()


def page_index_for(offset: int, page_size: int) -> int:
    return offset // page_size


# ------------------------------------------------------------------------------------------------ #
#                                         PAGE ID                                                  #
# ------------------------------------------------------------------------------------------------ #
@dataclass(frozen=True, order=True)
class PageId:
    file_id: str
    page_index: int

    def __post_init__(self) -> None:
        if not self.file_id or "/" in self.file_id or self.file_id.startswith("."):
            raise ValueError(f"Invalid file id {self.file_id!r}.")
        if self.page_index < 0:
            raise ValueError(f"Page index must be non-negative, got {self.page_index}.")

    def __str__(self) -> str:
        return f"{self.file_id}:{self.page_index}"


# ------------------------------------------------------------------------------------------------ #
#                                          LAYOUT                                                  #
# ------------------------------------------------------------------------------------------------ #
@dataclass(frozen=True)
class StoreLayout(DataClass):
    root: str
    page_size: int = DEFAULT_PAGE_SIZE
    bucket_count: int = DEFAULT_BUCKET_COUNT
    per_dir_capacity: Optional[int] = None

    def __post_init__(self) -> None:
        if self.page_size < 1:
            raise ValueError(f"page_size must be positive, got {self.page_size}.")
        if self.bucket_count < 1:
            raise ValueError(f"bucket_count must be positive, got {self.bucket_count}.")
        if self.per_dir_capacity is not None and self.per_dir_capacity < 1:
            raise ValueError(f"per_dir_capacity must be positive, got {self.per_dir_capacity}.")

    @property
    def page_size_dir(self) -> Path:
        return Path(self.root) / f"{PAGE_SIZE_PREFIX}{self.page_size}"

    def bucket_of(self, file_id: str) -> int:
        return stable_hash(file_id) % self.bucket_count

    def file_dir(self, file_id: str) -> Path:
        return self.page_size_dir / f"{BUCKET_PREFIX}{self.bucket_of(file_id)}" / file_id

    def path_for(self, page_id: PageId) -> Path:
        return self.file_dir(page_id.file_id) / str(page_id.page_index)


def path_for(layout: StoreLayout, page_id: PageId) -> Path:
    """Returns root/page_size=<bytes>/bucket_<b>/<file_id>/<page_index>."""
    return layout.path_for(page_id)


# ------------------------------------------------------------------------------------------------ #
#                                         PAGE RECORD                                              #
# ------------------------------------------------------------------------------------------------ #
@dataclass(frozen=True)
class PageRecord(DataClass):
    page_id: PageId
    length: int
    dir: int = 0
    created_at: Optional[float] = field(default=None, compare=False)


# ------------------------------------------------------------------------------------------------ #
#                                          PAGE STORE                                              #
# ------------------------------------------------------------------------------------------------ #
class PageStore:
    """Persists pages of one cache directory.

    Writes go to a temporary name in the page's own directory and are renamed into place, so a
    reader sees either no page or the complete page. Writers and deleters of the same page are
    serialized on a striped lock. Reads take no lock, except that a
    checksum mismatch is confirmed by reading the page and its sidecar again under the lock.

    Args:
        layout (StoreLayout): Directory layout rooted at this cache directory.
        dir_id (int): Identifier of this directory among the cache's directories.
        checksums (bool): Keep a CRC32C sidecar per page and verify it on read.
        read_workers (int): Threads available to reads that carry a timeout.
    """

    def __init__(
        self,
        layout: StoreLayout,
        dir_id: int = 0,
        checksums: bool = False,
        read_workers: int = 16,
        lock_stripes: int = 64,
    ) -> None:
        self._layout = layout
        self._dir_id = dir_id
        self._checksums = checksums
        self._locks = [threading.Lock() for _ in range(lock_stripes)]
        self._executor = ThreadPoolExecutor(
            max_workers=read_workers, thread_name_prefix=f"edgecache-read-{dir_id}"
        )
        self._logger = logging.getLogger(f"{self.__class__.__name__}")
        self._layout.page_size_dir.mkdir(parents=True, exist_ok=True)

    @property
    def layout(self) -> StoreLayout:
        return self._layout

    @property
    def dir_id(self) -> int:
        return self._dir_id

    @property
    def page_size(self) -> int:
        return self._layout.page_size

    def path_for(self, page_id: PageId) -> Path:
        return self._layout.path_for(page_id)

    # -------------------------------------------------------------------------------------------- #
    def write_page(self, page_id: PageId, data: bytes) -> PageRecord:
        """Atomically persists a page and returns its record.

        Raises:
            InvalidRangeError: If data is empty or larger than the page size.
            DiskFullError: If the device reports no space left. No partial file remains.
        """
        if not 0 < len(data) <= self.page_size:
            msg = f"Page {page_id} length {len(data)} outside 1..{self.page_size}."
            self._logger.error(msg)
            raise InvalidRangeError(msg)

        path = self.path_for(page_id)
        with self._lock_for(page_id):
            tmp = path.parent / f".{path.name}.{uuid.uuid4().hex}{TEMP_SUFFIX}"
            try:
                path.parent.mkdir(parents=True, exist_ok=True)
                if self._checksums:
                    self._write_checksum(path, data)
                self._write_file(tmp, data)
                os.replace(tmp, path)
            except OSError as e:
                self._discard(tmp)
                if e.errno == errno.ENOSPC:
                    msg = f"No space left on device writing page {page_id} to {path.parent}."
                    self._logger.warning(msg)
                    raise DiskFullError(errno.ENOSPC, msg) from e
                self._logger.exception(f"Failed to write page {page_id}.")
                raise
        return PageRecord(
            page_id=page_id, length=len(data), dir=self._dir_id, created_at=time.time()
        )

    # -------------------------------------------------------------------------------------------- #
    def read_page(
        self,
        page_id: PageId,
        offset: int,
        length: int,
        expected_length: Optional[int] = None,
        timeout: Optional[float] = None,
    ) -> bytes:
        """Reads exactly `length` bytes of a page starting at `offset`.

        Args:
            expected_length (int): Stored length known to the caller. A file of any other size
                is reported as corrupted.
            timeout (float): Seconds to wait for the local read before giving up.

        Raises:
            PageNotFoundError: The page is absent.
            CorruptedPageError: The file is shorter than the range, has an unexpected size, or
                fails its checksum.
            PageReadTimeoutError: The read did not complete within `timeout`.
        """
        if offset < 0 or length < 1:
            msg = f"Invalid range offset={offset}, length={length} for page {page_id}."
            self._logger.error(msg)
            raise InvalidRangeError(msg)
        if timeout is None:
            return self._read(page_id, offset, length, expected_length)

        future = self._executor.submit(self._read, page_id, offset, length, expected_length)
        try:
            return future.result(timeout=timeout)
        except concurrent.futures.TimeoutError as e:
            future.cancel()
            msg = f"Read of page {page_id} exceeded {timeout}s."
            self._logger.warning(msg)
            raise PageReadTimeoutError(msg) from e

    # -------------------------------------------------------------------------------------------- #
    def delete_page(self, page_id: PageId, unless: Optional[Callable[[], bool]] = None) -> bool:
        """Removes a page. Returns True iff a page file was removed.

        Args:
            unless (Callable): Checked under the page lock. The page is kept when it returns True.
        """
        path = self.path_for(page_id)
        with self._lock_for(page_id):
            if unless is not None and unless():
                return False
            self._discard(path.with_name(path.name + CHECKSUM_SUFFIX))
            try:
                os.remove(path)
                return True
            except FileNotFoundError:
                return False

    # -------------------------------------------------------------------------------------------- #
    def restore(self, on_skip: Optional[Callable[[Path, str], None]] = None) -> list[PageRecord]:
        """Enumerates every well-formed page under the layout.

        Malformed entries are skipped and reported through `on_skip(path, reason)` (by default
        a warning log). Temporary files left by an interrupted write are removed.

        Raises:
            PageSizeMismatchError: The root holds pages written with another page size.
        """
        report = on_skip or self._report_skipped
        root = Path(self._layout.root)
        expected = self._layout.page_size_dir.name
        records: list[PageRecord] = []

        for entry in sorted(root.iterdir()):
            if entry.name.startswith("."):
                continue
            if entry.is_dir() and entry.name.startswith(PAGE_SIZE_PREFIX):
                if entry.name != expected:
                    msg = (
                        f"Cache root {root} holds {entry.name}, configured {expected}. "
                        "The existing store must be discarded."
                    )
                    self._logger.error(msg)
                    raise PageSizeMismatchError(msg)
                continue
            report(entry, "not part of the page layout")

        page_size_dir = self._layout.page_size_dir
        if not page_size_dir.exists():
            return records

        for bucket_dir in sorted(page_size_dir.iterdir()):
            match = _BUCKET.fullmatch(bucket_dir.name)
            if not bucket_dir.is_dir() or match is None:
                report(bucket_dir, "not a bucket directory")
                continue
            bucket = int(match.group(1))
            for file_dir in sorted(bucket_dir.iterdir()):
                if not file_dir.is_dir() or self._layout.bucket_of(file_dir.name) != bucket:
                    report(file_dir, "file directory does not hash to its bucket")
                    continue
                records.extend(self._restore_file(file_dir, report))

        self._logger.info(f"Restored {len(records)} pages from {page_size_dir}.")
        return records

    def _restore_file(
        self, file_dir: Path, report: Callable[[Path, str], None]
    ) -> list[PageRecord]:
        records = []
        for leaf in sorted(file_dir.iterdir()):
            name = leaf.name
            if name.endswith(TEMP_SUFFIX) and name.startswith("."):
                self._discard(leaf)
                continue
            if name.endswith(CHECKSUM_SUFFIX) or name in SIDECAR_NAMES:
                continue
            if not leaf.is_file() or _DECIMAL.fullmatch(name) is None:
                report(leaf, "not a page file")
                continue
            stat = leaf.stat()
            if not 0 < stat.st_size <= self.page_size:
                report(leaf, f"size {stat.st_size} outside 1..{self.page_size}")
                continue
            page_id = PageId(file_id=file_dir.name, page_index=int(name))
            records.append(
                PageRecord(
                    page_id=page_id, length=stat.st_size, dir=self._dir_id, created_at=stat.st_mtime
                )
            )
        return records

    # -------------------------------------------------------------------------------------------- #
    def discard_mismatched(self) -> int:
        """Removes page-size folders that do not match the configured page size."""
        removed = 0
        root = Path(self._layout.root)
        for entry in root.iterdir():
            if entry.is_dir() and entry.name.startswith(PAGE_SIZE_PREFIX):
                if entry != self._layout.page_size_dir:
                    shutil.rmtree(entry, ignore_errors=True)
                    removed += 1
        return removed

    def wipe(self) -> None:
        """Removes every page and sidecar, keeping the top-level layout folder."""
        page_size_dir = self._layout.page_size_dir
        for entry in list(page_size_dir.iterdir()) if page_size_dir.exists() else []:
            if entry.is_dir():
                shutil.rmtree(entry)
            else:
                entry.unlink()
        page_size_dir.mkdir(parents=True, exist_ok=True)

    def close(self) -> None:
        self._executor.shutdown(wait=False, cancel_futures=True)

    # -------------------------------------------------------------------------------------------- #
    #                                   FILE PRIMITIVES                                            #
    # -------------------------------------------------------------------------------------------- #
    def _write_file(self, path: Path, data: bytes) -> None:
        with open(path, "wb") as f:
            f.write(data)
            f.flush()

    def _read_file(
        self, path: Path, offset: int, length: int, expected_length: Optional[int]
    ) -> bytes:
        with open(path, "rb") as f:
            size = os.fstat(f.fileno()).st_size
            if expected_length is not None and size != expected_length:
                raise CorruptedPageError(
                    f"Page file {path} is {size} bytes, expected {expected_length}."
                )
            if offset + length > size:
                raise CorruptedPageError(
                    f"Page file {path} is {size} bytes, range ends at {offset + length}."
                )
            if self._checksums:
                data = f.read(size)
                self._verify_checksum(path, data)
                return data[offset : offset + length]
            f.seek(offset)
            data = f.read(length)
        if len(data) != length:
            raise CorruptedPageError(f"Short read of {len(data)}/{length} bytes from {path}.")
        return data

    def _read(
        self, page_id: PageId, offset: int, length: int, expected_length: Optional[int]
    ) -> bytes:
        path = self.path_for(page_id)
        try:
            try:
                return self._read_file(path, offset, length, expected_length)
            except CorruptedPageError:
                if not self._checksums:
                    raise
                # A rewrite may have paired the old page with the new sidecar.
                with self._lock_for(page_id):
                    return self._read_file(path, offset, length, expected_length)
        except FileNotFoundError as e:
            raise PageNotFoundError(str(page_id)) from e
        except CorruptedPageError as e:
            self._logger.warning(str(e))
            raise

    def _write_checksum(self, path: Path, data: bytes) -> None:
        sidecar = path.with_name(path.name + CHECKSUM_SUFFIX)
        tmp = sidecar.with_name(f".{sidecar.name}.{uuid.uuid4().hex}{TEMP_SUFFIX}")
        try:
            self._write_file(tmp, crc32c.crc32c(data).to_bytes(4, "big"))
            os.replace(tmp, sidecar)
        except OSError:
            self._discard(tmp)
            raise

    def _verify_checksum(self, path: Path, data: bytes) -> None:
        sidecar = path.with_name(path.name + CHECKSUM_SUFFIX)
        try:
            expected = int.from_bytes(sidecar.read_bytes(), "big")
        except FileNotFoundError as e:
            raise CorruptedPageError(f"Checksum sidecar missing for {path}.") from e
        if crc32c.crc32c(data) != expected:
            raise CorruptedPageError(f"Checksum mismatch for {path}.")

    def _lock_for(self, page_id: PageId) -> threading.Lock:
        return self._locks[stable_hash(str(page_id)) % len(self._locks)]

    @staticmethod
    def _discard(path: Path) -> None:
        try:
            os.remove(path)
        except FileNotFoundError:
            pass

    def _report_skipped(self, path: Path, reason: str) -> None:
        self._logger.warning(f"Skipped {path} during restore: {reason}.")
