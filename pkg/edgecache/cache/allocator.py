#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : Embeddable Local Page Cache                                                         #
# Version    : 0.1.0                                                                               #
# Python     : 3.10.12                                                                             #
# Filename   : /edgecache/cache/allocator.py                                                       #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : Enter URL in Workspace Settings                                                     #
# ------------------------------------------------------------------------------------------------ #
# Created    : Monday September 28th 2026 01:44:08 pm                                              #
# Modified   : Thursday October 1st 2026 04:02:14 pm                                               #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Maps pages to cache directories."""
from __future__ import annotations
import logging
import math
from typing import Callable, Sequence

from edgecache.exceptions import NoSpaceError
from edgecache.store.page import PageId, stable_hash

# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)
# ------------------------------------------------------------------------------------------------ #
_HASH_SPACE = float(2**64)


# ------------------------------------------------------------------------------------------------ #
class Allocator:
    """Capacity-weighted rendezvous hashing over cache directories.

    Each directory scores a file as -capacity / ln(u), with u a uniform hash of (file, dir) in
    (0, 1). The highest score is the file's primary directory, so every page of a file prefers
    the same directory and files spread over directories in proportion to capacity. The
    remaining directories, in score order, are the fall-through sequence.
    """

    def __init__(self, capacities: Sequence[int]) -> None:
        if not capacities:
            raise ValueError("At least one cache directory is required.")
        if any(c < 1 for c in capacities):
            raise ValueError(f"Directory capacities must be positive, got {list(capacities)}.")
        self._capacities = tuple(capacities)

    @property
    def dir_count(self) -> int:
        return len(self._capacities)

    def ranking(self, file_id: str) -> list[int]:
        """Directories ordered by preference for the file."""
        if len(self._capacities) == 1:
            return [0]
        scores = []
        for dir, capacity in enumerate(self._capacities):
            u = (stable_hash(f"{file_id}/{dir}") + 0.5) / _HASH_SPACE
            scores.append((-capacity / math.log(u), dir))
        return [dir for _, dir in sorted(scores, key=lambda s: (-s[0], s[1]))]

    def primary(self, file_id: str) -> int:
        return self.ranking(file_id)[0]

    def allocate(self, page_id: PageId, length: int, has_room: Callable[[int, int], bool]) -> int:
        """Returns the first directory in the file's ranking that can take `length` bytes.

        Args:
            has_room (Callable): Called with (dir, length); may evict before answering.

        Raises:
            NoSpaceError: If no directory can take the page.
        """
        for dir in self.ranking(page_id.file_id):
            if has_room(dir, length):
                return dir
        msg = f"No cache directory can hold page {page_id} ({length} bytes)."
        logger.debug(msg)
        raise NoSpaceError(msg)
