#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : Embeddable Local Page Cache                                                         #
# Version    : 0.1.0                                                                               #
# Python     : 3.10.12                                                                             #
# Filename   : /edgecache/container.py                                                             #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : Enter URL in Workspace Settings                                                     #
# ------------------------------------------------------------------------------------------------ #
# Created    : Saturday October 10th 2026 04:12:24 pm                                              #
# Modified   : Saturday October 17th 2026 07:34:58 pm                                              #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Package dependency container."""
import logging.config
import os

from dependency_injector import containers, providers

from edgecache.cache.config import CacheConfig
from edgecache.cache.manager import CacheManager
from edgecache.metrics.registry import MetricsRegistry

# ------------------------------------------------------------------------------------------------ #
CONFIG_FILE = os.path.join(os.path.dirname(__file__), "config", "edgecache.yml")


# ------------------------------------------------------------------------------------------------ #
#                                       LOGGING CONTAINER                                          #
# ------------------------------------------------------------------------------------------------ #
class LoggingContainer(containers.DeclarativeContainer):
    config = providers.Configuration()

    main = providers.Resource(logging.config.dictConfig, config=config.logging)


# ------------------------------------------------------------------------------------------------ #
#                                        CACHE CONTAINER                                           #
# ------------------------------------------------------------------------------------------------ #
class CacheContainer(containers.DeclarativeContainer):
    config = providers.Configuration()
    metrics = providers.Dependency(instance_of=MetricsRegistry)

    settings = providers.Factory(CacheConfig.from_document, document=config.cache)

    # The backing store is supplied per call: cache.manager(backing=store).
    manager = providers.Factory(CacheManager, config=settings, metrics=metrics)


# ------------------------------------------------------------------------------------------------ #
#                                          FRAMEWORK                                               #
# ------------------------------------------------------------------------------------------------ #
class EdgeCacheContainer(containers.DeclarativeContainer):
    config = providers.Configuration(yaml_files=[CONFIG_FILE])

    logs = providers.Container(LoggingContainer, config=config)

    metrics = providers.Singleton(MetricsRegistry)

    cache = providers.Container(CacheContainer, config=config, metrics=metrics)
