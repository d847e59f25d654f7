#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : Embeddable Local Page Cache                                                         #
# Version    : 0.1.0                                                                               #
# Python     : 3.10.12                                                                             #
# Filename   : /edgecache/service/io.py                                                            #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : Enter URL in Workspace Settings                                                     #
# ------------------------------------------------------------------------------------------------ #
# Created    : Wednesday September 2nd 2026 12:50:50 pm                                            #
# Modified   : Wednesday September 9th 2026 07:56:32 pm                                            #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""File IO for configuration documents, traces and reports."""
from __future__ import annotations
from abc import ABC, abstractmethod
import json
import logging
import os
from typing import Any

import numpy as np
import pandas as pd
import yaml

# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)
# ------------------------------------------------------------------------------------------------ #
TRACE_COLUMNS = ["timestamp_ms", "file_id", "offset", "length", "scope", "run_id"]
TRACE_DTYPES = {
    "timestamp_ms": np.int64,
    "file_id": str,
    "offset": np.int64,
    "length": np.int64,
    "scope": str,
    "run_id": str,
}


# ------------------------------------------------------------------------------------------------ #
class IO(ABC):
    @classmethod
    def read(cls, filepath: str, *args, **kwargs) -> Any:
        return cls._read(filepath, **kwargs)

    @classmethod
    @abstractmethod
    def _read(cls, filepath: str, **kwargs) -> Any:
        pass

    @classmethod
    def write(cls, filepath: str, data: Any, *args, **kwargs) -> None:
        dirname = os.path.dirname(filepath)
        if dirname:
            os.makedirs(dirname, exist_ok=True)
        cls._write(filepath, data, **kwargs)

    @classmethod
    @abstractmethod
    def _write(cls, filepath: str, data: Any, **kwargs) -> None:
        pass


# ------------------------------------------------------------------------------------------------ #
#                                           YAML                                                   #
# ------------------------------------------------------------------------------------------------ #
class YamlIO(IO):
    @classmethod
    def _read(cls, filepath: str, **kwargs) -> dict:
        with open(filepath, "r") as f:
            try:
                return yaml.safe_load(f)
            except yaml.YAMLError as e:
                logger.error(e)
                raise IOError(e) from e

    @classmethod
    def _write(cls, filepath: str, data: Any, **kwargs) -> None:
        with open(filepath, "w") as f:
            try:
                yaml.safe_dump(data, f, sort_keys=False)
            except yaml.YAMLError as e:
                logger.error(e)
                raise IOError(e) from e


# ------------------------------------------------------------------------------------------------ #
#                                           JSON                                                   #
# ------------------------------------------------------------------------------------------------ #
class JsonIO(IO):
    @classmethod
    def _read(cls, filepath: str, **kwargs) -> Any:
        """Read the parsed document from a json file."""
        with open(filepath) as json_file:
            try:
                return json.load(json_file)
            except json.JSONDecodeError as e:
                logger.error(f"Unable to parse {filepath}.\n{e}")
                raise

    @classmethod
    def _write(cls, filepath: str, data: Any, **kwargs) -> None:
        """Writes a dictionary or list to a json file. Numpy scalars are converted."""
        with open(filepath, "w") as json_file:
            json.dump(data, json_file, indent=2, default=cls._default)

    @staticmethod
    def _default(o: Any) -> Any:
        if isinstance(o, np.integer):
            return int(o)
        if isinstance(o, np.floating):
            return float(o)
        if isinstance(o, np.ndarray):
            return o.tolist()
        raise TypeError(f"Object of type {type(o).__name__} is not JSON serializable")


# ------------------------------------------------------------------------------------------------ #
#                                            CSV                                                   #
# ------------------------------------------------------------------------------------------------ #
class CSVIO(IO):
    @classmethod
    def _read(
        cls,
        filepath: str,
        sep: str = ",",
        header: int | None = 0,
        encoding: str = "utf-8",
        **kwargs,
    ) -> pd.DataFrame:
        return pd.read_csv(filepath, sep=sep, header=header, encoding=encoding, **kwargs)

    @classmethod
    def _write(
        cls,
        filepath: str,
        data: pd.DataFrame,
        sep: str = ",",
        index: bool = False,
        encoding: str = "utf-8",
        **kwargs,
    ) -> None:
        data.to_csv(filepath, sep=sep, index=index, encoding=encoding)


# ------------------------------------------------------------------------------------------------ #
#                                           TRACE                                                  #
# ------------------------------------------------------------------------------------------------ #
class TraceIO(IO):
    """Headerless records `timestamp_ms,file_id,offset,length,scope,run_id`, one per line."""

    @classmethod
    def _read(cls, filepath: str, **kwargs) -> pd.DataFrame:
        return pd.read_csv(
            filepath,
            header=None,
            names=TRACE_COLUMNS,
            dtype=TRACE_DTYPES,
            keep_default_na=False,
            comment="#",
        )

    @classmethod
    def _write(cls, filepath: str, data: pd.DataFrame, **kwargs) -> None:
        data[TRACE_COLUMNS].to_csv(filepath, header=False, index=False, lineterminator="\n")


# ------------------------------------------------------------------------------------------------ #
class IOService:
    __io = {
        "csv": CSVIO,
        "trace": TraceIO,
        "yaml": YamlIO,
        "yml": YamlIO,
        "json": JsonIO,
    }
    _logger = logging.getLogger(f"{__name__}.IOService")

    @classmethod
    def read(cls, filepath: str, **kwargs) -> Any:
        io = cls._get_io(filepath)
        return io.read(filepath, **kwargs)

    @classmethod
    def write(cls, filepath: str, data: Any, **kwargs) -> None:
        io = cls._get_io(filepath)
        io.write(filepath=filepath, data=data, **kwargs)

    @classmethod
    def _get_io(cls, filepath: str) -> IO:
        try:
            file_format = os.path.splitext(filepath)[-1].replace(".", "").lower()
            return cls.__io[file_format]
        except KeyError as exc:
            msg = f"File type {file_format} is not supported."
            cls._logger.exception(msg)
            raise ValueError(msg) from exc
