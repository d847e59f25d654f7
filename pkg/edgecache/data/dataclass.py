#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : Embeddable Local Page Cache                                                         #
# Version    : 0.1.0                                                                               #
# Python     : 3.10.12                                                                             #
# Filename   : /edgecache/data/dataclass.py                                                        #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : Enter URL in Workspace Settings                                                     #
# ------------------------------------------------------------------------------------------------ #
# Created    : Sunday September 6th 2026 05:26:02 pm                                               #
# Modified   : Tuesday September 8th 2026 09:20:20 am                                              #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
from __future__ import annotations
from dataclasses import fields
from enum import Enum
from typing import Any

import numpy as np
import pandas as pd

from edgecache.data import LABEL_TYPES, SCALAR_TYPES, SEQUENCE_TYPES


# ------------------------------------------------------------------------------------------------ #
class DataClass:
    """Mixin for the dataclass value objects of the cache: configs, records, reports.

    Subclasses are dataclasses, frozen or not. Those declared with repr=False get the compact
    repr below, which leaves out non-scalar fields such as payload bytes.
    """

    def __repr__(self) -> str:
        return "{}({})".format(
            self.__class__.__name__,
            ", ".join(
                "{}={!r}".format(f.name, getattr(self, f.name))
                for f in fields(self)
                if f.repr and isinstance(getattr(self, f.name), SCALAR_TYPES + LABEL_TYPES)
            ),
        )

    def __str__(self) -> str:
        width = 32
        breadth = width * 2
        s = f"\n\n{self.__class__.__name__.center(breadth, ' ')}"
        for k, v in self.as_dict().items():
            if isinstance(v, SCALAR_TYPES) or v is None:
                s += f"\n{k.replace('_', ' ').capitalize().rjust(width, ' ')} | {v}"
        s += "\n\n"
        return s

    def as_dict(self) -> dict:
        """Returns a dictionary of public fields with nested values exported recursively."""
        return {
            f.name: self._export(getattr(self, f.name))
            for f in fields(self)
            if not f.name.startswith("_")
        }

    @classmethod
    def _export(cls, v: Any) -> Any:
        """Converts v into plain python values."""
        if isinstance(v, Enum):
            return v.value
        if v is None or isinstance(v, (bool, str)):
            return v
        if isinstance(v, LABEL_TYPES):
            return str(v)
        if isinstance(v, (np.integer,)):
            return int(v)
        if isinstance(v, (np.floating,)):
            return float(v)
        if isinstance(v, SCALAR_TYPES):
            return v
        if isinstance(v, SEQUENCE_TYPES):
            return [cls._export(item) for item in v]
        if isinstance(v, (set, frozenset)):
            return sorted(cls._export(item) for item in v)
        if isinstance(v, dict):
            return {str(cls._export(k)): cls._export(val) for k, val in v.items()}
        if hasattr(v, "as_dict"):
            return v.as_dict()
        return str(v)

    def as_df(self) -> pd.DataFrame:
        """Returns the scalar fields as a single-row DataFrame."""
        d = {k: v for k, v in self.as_dict().items() if not isinstance(v, (list, dict))}
        return pd.DataFrame(data=d, index=[0])
