#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : Embeddable Local Page Cache                                                         #
# Version    : 0.1.0                                                                               #
# Python     : 3.10.12                                                                             #
# Filename   : /edgecache/trace/backing.py                                                         #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : Enter URL in Workspace Settings                                                     #
# ------------------------------------------------------------------------------------------------ #
# Created    : Monday September 14th 2026 03:18:06 pm                                              #
# Modified   : Friday September 18th 2026 11:28:16 am                                              #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Deterministic synthetic backing store.

The byte at (file, offset) is a pure function of (seed, file, version, offset), produced in
64 KiB chunks from a PCG64 stream keyed by those values. Replays verify every response against
`content` without keeping any corpus on disk.
"""
from __future__ import annotations
from functools import lru_cache
import logging
import threading
import time
from typing import Mapping, Optional, Union

import numpy as np
import pandas as pd

from edgecache.cache.manager import BackingStore
from edgecache.exceptions import InvalidRangeError
from edgecache.store.page import stable_hash
from edgecache.trace.generation import DEFAULT_OBJECT_SIZE

# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)
# ------------------------------------------------------------------------------------------------ #
CHUNK_SIZE = 64 * 1024


@lru_cache(maxsize=8192)
def _chunk(seed: int, key: int, index: int) -> bytes:
    rng = np.random.Generator(np.random.PCG64([seed, key, index]))
    return rng.bytes(CHUNK_SIZE)


# ------------------------------------------------------------------------------------------------ #
class SyntheticBackingStore(BackingStore):
    """Remote store whose content is computed rather than stored.

    Args:
        file_size (int | Mapping[str, int]): Size of every file, or sizes by file id. Files
            missing from a mapping are unknown and read as empty.
        seed (int): Content seed.
        version (int): Initial version of every file.
        latency_s (float): Sleep before each read.
    """

    def __init__(
        self,
        file_size: Union[int, Mapping[str, int]] = DEFAULT_OBJECT_SIZE,
        seed: int = 0,
        version: int = 1,
        latency_s: float = 0.0,
    ) -> None:
        self._sizes = dict(file_size) if isinstance(file_size, Mapping) else None
        self._default_size = None if isinstance(file_size, Mapping) else int(file_size)
        self._seed = seed
        self._initial_version = version
        self._versions: dict[str, int] = {}
        self._latency = latency_s
        self._lock = threading.Lock()
        self._requests = 0
        self._bytes_read = 0

    @classmethod
    def for_trace(
        cls, trace: pd.DataFrame, seed: int = 0, file_size: Optional[int] = None
    ) -> SyntheticBackingStore:
        """Store sized to a trace: each file ends where its furthest read ends, unless
        `file_size` fixes one size for every file."""
        if file_size is not None:
            return cls(file_size=file_size, seed=seed)
        ends = (trace["offset"] + trace["length"]).groupby(trace["file_id"]).max()
        return cls(file_size={str(k): int(v) for k, v in ends.items()}, seed=seed)

    # -------------------------------------------------------------------------------------------- #
    @property
    def requests(self) -> int:
        return self._requests

    @property
    def bytes_read(self) -> int:
        return self._bytes_read

    def reset_counters(self) -> None:
        with self._lock:
            self._requests = 0
            self._bytes_read = 0

    def file_length(self, file_id: str) -> Optional[int]:
        if self._sizes is not None:
            return self._sizes.get(file_id, 0)
        return self._default_size

    def file_version(self, file_id: str) -> int:
        with self._lock:
            return self._versions.get(file_id, self._initial_version)

    def bump_version(self, file_id: str) -> int:
        """Models an overwrite of the file. Returns the new version."""
        with self._lock:
            version = self._versions.get(file_id, self._initial_version) + 1
            self._versions[file_id] = version
        return version

    # -------------------------------------------------------------------------------------------- #
    def read(self, file_id: str, offset: int, length: int) -> bytes:
        if self._latency:
            time.sleep(self._latency)
        data = self.content(file_id, offset, length)
        with self._lock:
            self._requests += 1
            self._bytes_read += len(data)
        return data

    def content(self, file_id: str, offset: int, length: int) -> bytes:
        """The bytes a correct read of the range returns, shortened at end of file."""
        if offset < 0 or length < 0:
            raise InvalidRangeError(f"Invalid range offset={offset}, length={length}.")
        end = min(offset + length, self.file_length(file_id) or 0)
        if end <= offset:
            return b""
        key = stable_hash(f"{file_id}\x00{self.file_version(file_id)}")
        parts = []
        for index in range(offset // CHUNK_SIZE, (end - 1) // CHUNK_SIZE + 1):
            chunk = _chunk(self._seed, key, index)
            base = index * CHUNK_SIZE
            parts.append(chunk[max(offset, base) - base : min(end, base + CHUNK_SIZE) - base])
        return b"".join(parts)
