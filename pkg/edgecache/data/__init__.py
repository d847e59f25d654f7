#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : Embeddable Local Page Cache                                                         #
# Version    : 0.1.0                                                                               #
# Python     : 3.10.12                                                                             #
# Filename   : /edgecache/data/__init__.py                                                         #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : Enter URL in Workspace Settings                                                     #
# ------------------------------------------------------------------------------------------------ #
# Created    : Thursday September 3rd 2026 04:49:43 pm                                             #
# Modified   : Friday September 4th 2026 08:27:09 am                                               #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
from enum import Enum
from pathlib import PurePath

import numpy as np

# ------------------------------------------------------------------------------------------------ #
SCALAR_TYPES: tuple = (
    str,
    int,
    float,
    bool,
    np.int32,
    np.int64,
    np.float32,
    np.float64,
)
SEQUENCE_TYPES: tuple = (
    list,
    tuple,
)
# Rendered through their value or string form when a dataclass is exported.
LABEL_TYPES: tuple = (
    Enum,
    PurePath,
)
