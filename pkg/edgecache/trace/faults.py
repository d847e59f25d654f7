#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : Embeddable Local Page Cache                                                         #
# Version    : 0.1.0                                                                               #
# Python     : 3.10.12                                                                             #
# Filename   : /edgecache/trace/faults.py                                                          #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : Enter URL in Workspace Settings                                                     #
# ------------------------------------------------------------------------------------------------ #
# Created    : Sunday September 20th 2026 04:32:44 pm                                              #
# Modified   : Saturday September 26th 2026 01:14:38 pm                                            #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Fault schedules and a page store that can be made to misbehave on cue."""
from __future__ import annotations
from dataclasses import dataclass
from enum import Enum
import errno
import logging
import os
from pathlib import Path
import threading
import time
from typing import Iterable, Optional

from edgecache.data.dataclass import DataClass
from edgecache.exceptions import TraceParseError
from edgecache.service.io import IOService
from edgecache.store.page import PageId, PageStore

# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)
# ------------------------------------------------------------------------------------------------ #
FAULT_KEYS = frozenset({"at_request_index", "target", "kind", "param"})
HANG_TIMEOUT_FACTOR = 2.0


# ------------------------------------------------------------------------------------------------ #
class FaultType(str, Enum):
    HANG = "hang"
    CORRUPT = "corrupt"
    ENOSPC = "enospc"


@dataclass(frozen=True)
class Fault(DataClass):
    """One injection, applied just before the request at `at_request_index`.

    `target` names the backing file whose cached pages are affected; None means the file of
    that request. For hang the param is the stall in seconds, by default HANG_TIMEOUT_FACTOR
    times the cache's read timeout. For enospc it is the number of writes that fail. Corrupt
    takes no param.
    """

    at_request_index: int
    kind: FaultType
    target: Optional[str] = None
    param: Optional[float] = None

    def __post_init__(self) -> None:
        if self.at_request_index < 0:
            raise TraceParseError(f"Fault index must be non-negative, got {self.at_request_index}.")
        if self.param is not None and self.param < 0:
            raise TraceParseError(f"Fault param must be non-negative, got {self.param}.")

    @classmethod
    def from_document(cls, document: dict) -> Fault:
        if not isinstance(document, dict):
            raise TraceParseError(f"A fault must be a mapping, got {document!r}.")
        unknown = sorted(set(document) - FAULT_KEYS)
        if unknown:
            raise TraceParseError(f"Unknown fault key '{unknown[0]}'.")
        try:
            return cls(
                at_request_index=int(document["at_request_index"]),
                kind=FaultType(document["kind"]),
                target=document.get("target"),
                param=None if document.get("param") is None else float(document["param"]),
            )
        except KeyError as e:
            raise TraceParseError(f"Fault is missing {e}.") from e
        except ValueError as e:
            if isinstance(e, TraceParseError):
                raise
            raise TraceParseError(f"Invalid fault {document}: {e}") from e

    def to_document(self) -> dict:
        document = {"at_request_index": self.at_request_index, "kind": self.kind.value}
        if self.target is not None:
            document["target"] = self.target
        if self.param is not None:
            document["param"] = self.param
        return document


class FaultSchedule:
    """Faults ordered by request index."""

    def __init__(self, faults: Iterable[Fault] = ()) -> None:
        self._faults = sorted(faults, key=lambda f: f.at_request_index)
        self._by_index: dict[int, list[Fault]] = {}
        for fault in self._faults:
            self._by_index.setdefault(fault.at_request_index, []).append(fault)

    @classmethod
    def from_document(cls, document: object) -> FaultSchedule:
        """Accepts a list of faults or a mapping with a `faults` list."""
        if isinstance(document, dict):
            document = document.get("faults", [])
        if not isinstance(document, list):
            raise TraceParseError("A fault schedule must be a list of faults.")
        return cls(Fault.from_document(d) for d in document)

    @classmethod
    def from_file(cls, filepath: str) -> FaultSchedule:
        return cls.from_document(IOService.read(filepath))

    @property
    def faults(self) -> list[Fault]:
        return list(self._faults)

    def due(self, index: int) -> list[Fault]:
        return self._by_index.get(index, [])

    def to_document(self) -> list[dict]:
        return [f.to_document() for f in self._faults]

    def __len__(self) -> int:
        return len(self._faults)


# ------------------------------------------------------------------------------------------------ #
#                                      FAULTY PAGE STORE                                           #
# ------------------------------------------------------------------------------------------------ #
class FaultyPageStore(PageStore):
    """Page store whose reads can stall and whose writes can fail with ENOSPC."""

    def __init__(self, *args, **kwargs) -> None:
        super().__init__(*args, **kwargs)
        self._fault_lock = threading.Lock()
        self._hangs: list[float] = []
        self._enospc = 0

    def arm_hang(self, seconds: float, count: int = 1) -> None:
        """Stalls the next `count` page reads for `seconds` each."""
        with self._fault_lock:
            self._hangs.extend([seconds] * count)

    def arm_enospc(self, count: int = 1) -> None:
        """Fails the next `count` page writes with ENOSPC."""
        with self._fault_lock:
            self._enospc += count

    def disarm(self) -> None:
        with self._fault_lock:
            self._hangs.clear()
            self._enospc = 0

    def corrupt(self, page_id: PageId) -> bool:
        """Truncates a stored page to half its length. Returns False if the page is absent."""
        path = self.path_for(page_id)
        try:
            size = path.stat().st_size
        except FileNotFoundError:
            return False
        with open(path, "r+b") as f:
            f.truncate(size // 2)
        logger.debug(f"Corrupted page {page_id} at {path}.")
        return True

    # -------------------------------------------------------------------------------------------- #
    def _write_file(self, path: Path, data: bytes) -> None:
        with self._fault_lock:
            fail = self._enospc > 0
            if fail:
                self._enospc -= 1
        if fail:
            raise OSError(errno.ENOSPC, os.strerror(errno.ENOSPC), str(path))
        super()._write_file(path, data)

    def _read_file(
        self, path: Path, offset: int, length: int, expected_length: Optional[int]
    ) -> bytes:
        with self._fault_lock:
            stall = self._hangs.pop(0) if self._hangs else 0.0
        if stall:
            time.sleep(stall)
        return super()._read_file(path, offset, length, expected_length)
