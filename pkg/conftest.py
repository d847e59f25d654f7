#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : Embeddable Local Page Cache                                                         #
# Version    : 0.1.0                                                                               #
# Python     : 3.10.12                                                                             #
# Filename   : /conftest.py                                                                        #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : Enter URL in Workspace Settings                                                     #
# ------------------------------------------------------------------------------------------------ #
# Created    : Monday October 5th 2026 07:37:19 pm                                                 #
# Modified   : Friday October 9th 2026 05:39:33 pm                                                 #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
import logging
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from pathlib import PurePosixPath

import pytest
from hypothesis import HealthCheck, settings

from edgecache.cache.config import CacheConfig, DirConfig
from edgecache.container import EdgeCacheContainer
from edgecache.data.dataclass import DataClass
from edgecache.metrics.registry import MetricsRegistry
from edgecache.store.page import StoreLayout
from edgecache.trace.backing import SyntheticBackingStore

# ------------------------------------------------------------------------------------------------ #
logging.getLogger("hypothesis").setLevel(logging.WARNING)
# ------------------------------------------------------------------------------------------------ #
PAGE_SIZE = 4096
FILE_PAGES = 16
CONTENT_SEED = 7

settings.register_profile(
    "edgecache",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.function_scoped_fixture, HealthCheck.too_slow],
)
settings.load_profile("edgecache")

# ------------------------------------------------------------------------------------------------ #
collect_ignore_glob = []


# ------------------------------------------------------------------------------------------------ #
#                                      DATACLASS                                                   #
# ------------------------------------------------------------------------------------------------ #
class Tier(str, Enum):
    HOT = "hot"
    COLD = "cold"


@dataclass(repr=False)
class TestDataClass(DataClass):
    name: str = "test"
    size: int = 8329
    length: float = 920932.98
    tier: Tier = Tier.HOT
    root: PurePosixPath = PurePosixPath("/var/cache/edge")
    dt: datetime = datetime(2023, 8, 15, 18, 29, 16)
    pages: list = field(default_factory=lambda: [2, 3, 6])
    _hidden: int = 0


# ------------------------------------------------------------------------------------------------ #
#                              DEPENDENCY INJECTION                                                #
# ------------------------------------------------------------------------------------------------ #
@pytest.fixture(scope="module", autouse=True)
def container():
    container = EdgeCacheContainer()
    container.init_resources()
    container.wire(packages=["edgecache"])
    return container


# ------------------------------------------------------------------------------------------------ #
#                                     DATACLASS                                                    #
# ------------------------------------------------------------------------------------------------ #
@pytest.fixture(scope="module", autouse=False)
def dataklass():
    return TestDataClass()


# ------------------------------------------------------------------------------------------------ #
#                                    CACHE FIXTURES                                                #
# ------------------------------------------------------------------------------------------------ #
@pytest.fixture(scope="function", autouse=False)
def layout(tmp_path):
    return StoreLayout(root=str(tmp_path / "cache0"), page_size=PAGE_SIZE, bucket_count=8)


@pytest.fixture(scope="function", autouse=False)
def cache_config(tmp_path):
    """Builds small-page cache configurations rooted in the test's temporary directory."""

    def build(capacity_pages: int = 8, dirs: int = 1, **kwargs) -> CacheConfig:
        page_size = kwargs.pop("page_size_bytes", PAGE_SIZE)
        return CacheConfig(
            dirs=tuple(
                DirConfig(
                    path=str(tmp_path / f"cache{i}"), capacity_bytes=capacity_pages * page_size
                )
                for i in range(dirs)
            ),
            page_size_bytes=page_size,
            bucket_count=8,
            **kwargs,
        )

    return build


@pytest.fixture(scope="function", autouse=False)
def backing():
    return SyntheticBackingStore(file_size=FILE_PAGES * PAGE_SIZE, seed=CONTENT_SEED)


@pytest.fixture(scope="function", autouse=False)
def metrics():
    return MetricsRegistry()
