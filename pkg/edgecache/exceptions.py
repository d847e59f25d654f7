#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : Embeddable Local Page Cache                                                         #
# Version    : 0.1.0                                                                               #
# Python     : 3.10.12                                                                             #
# Filename   : /edgecache/exceptions.py                                                            #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : Enter URL in Workspace Settings                                                     #
# ------------------------------------------------------------------------------------------------ #
# Created    : Tuesday September 1st 2026 08:11:17 am                                              #
# Modified   : Wednesday September 2nd 2026 08:05:35 am                                            #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Exceptions raised by the edge cache."""


# ------------------------------------------------------------------------------------------------ #
#                                        CONFIGURATION                                             #
# ------------------------------------------------------------------------------------------------ #
class ConfigurationError(ValueError):
    """A configuration document or value violates a constraint."""


class AdmissionRuleError(ValueError):
    """A static admission rule document is malformed."""


class InvalidSpecError(ValueError):
    """A workload description is invalid."""


class TraceParseError(ValueError):
    """A trace, fault schedule or churn schedule could not be parsed."""


# ------------------------------------------------------------------------------------------------ #
#                                         PAGE STORE                                               #
# ------------------------------------------------------------------------------------------------ #
class PageNotFoundError(KeyError):
    """The page is not present in the store."""


class CorruptedPageError(OSError):
    """The stored page failed a length or checksum check."""


class DiskFullError(OSError):
    """The device holding a cache directory reported no space left."""


class PageReadTimeoutError(TimeoutError):
    """A local page read did not complete within the read timeout."""


class PageSizeMismatchError(ValueError):
    """A store root was written with a different page size than configured."""


class PartialWriteRolledBackError(OSError):
    """A multi-file write failed part way and was rolled back."""


# ------------------------------------------------------------------------------------------------ #
#                                     INDEX, CACHE AND QUOTA                                       #
# ------------------------------------------------------------------------------------------------ #
class DuplicatePageError(KeyError):
    """The page is already registered in the index."""


class InvalidRangeError(ValueError):
    """A read range is empty, negative or beyond the end of the file."""


class NoSpaceError(OSError):
    """No cache directory can hold the page, even after eviction."""


class ImpossibleFitError(ValueError):
    """The incoming bytes alone exceed a quota capacity."""


class BackingUnavailableError(OSError):
    """The backing store failed or timed out."""


# ------------------------------------------------------------------------------------------------ #
#                                         SCHEDULER                                                #
# ------------------------------------------------------------------------------------------------ #
class RingEmptyError(LookupError):
    """The hash ring has no node able to take work."""


class UnknownNodeError(KeyError):
    """The node is not a member of the hash ring."""
