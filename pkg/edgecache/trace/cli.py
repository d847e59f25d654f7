#!/usr/bin/env python3
# -*- coding:utf-8 -*-
# ================================================================================================ #
# Project    : Embeddable Local Page Cache                                                         #
# Version    : 0.1.0                                                                               #
# Python     : 3.10.12                                                                             #
# Filename   : /edgecache/trace/cli.py                                                             #
# ------------------------------------------------------------------------------------------------ #
# Author     : John James                                                                          #
# Email      : john.james.ai.studio@gmail.com                                                      #
# URL        : Enter URL in Workspace Settings                                                     #
# ------------------------------------------------------------------------------------------------ #
# Created    : Thursday September 17th 2026 03:55:25 pm                                            #
# Modified   : Tuesday September 22nd 2026 12:21:27 pm                                             #
# ------------------------------------------------------------------------------------------------ #
# License    : MIT License                                                                         #
# Copyright  : (c) 2026 John James                                                                 #
# ================================================================================================ #
"""Command line harness: generate, replay, simulate and characterise workloads."""
from dataclasses import replace
import json
import logging
import sys
from typing import Any, Optional

import click
from dependency_injector.wiring import Provide, inject
import pandas as pd
import typer

from edgecache.cache.config import CacheConfig, DirConfig
from edgecache.container import EdgeCacheContainer
from edgecache.eviction.policy import EvictionPolicyName
from edgecache.metrics.registry import MetricsRegistry
from edgecache.service.io import IOService, JsonIO
from edgecache.trace.backing import SyntheticBackingStore
from edgecache.trace.faults import FaultSchedule
from edgecache.trace.generation import ZipfWorkloadSpec, characterise, generate
from edgecache.trace.replay import TraceReplayer, load_trace, save_trace
from edgecache.trace.schedule import ChurnSchedule, simulate_schedule
from edgecache.trace.simulate import CacheSimulator, page_size_sweep

# ------------------------------------------------------------------------------------------------ #
logger = logging.getLogger(__name__)
# ------------------------------------------------------------------------------------------------ #
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MISMATCH = 2
DEFAULT_PAGE_SIZES = "65536,262144,1048576,4194304"

app = typer.Typer(add_completion=False, help="Workload harness for the edge cache.")


# ------------------------------------------------------------------------------------------------ #
#                                          HELPERS                                                 #
# ------------------------------------------------------------------------------------------------ #
@inject
def _metrics(metrics: MetricsRegistry = Provide[EdgeCacheContainer.metrics]) -> MetricsRegistry:
    metrics.reset()
    return metrics


def _emit(document: Any, out: Optional[str]) -> None:
    if out:
        if out.lower().endswith(".csv"):
            if not isinstance(document, pd.DataFrame):
                # Nested mappings become dotted columns of a single row.
                document = pd.json_normalize(document)
        elif isinstance(document, pd.DataFrame):
            document = document.to_dict(orient="records")
        IOService.write(out, document)
        logger.info(f"Wrote {out}.")
        return
    if isinstance(document, pd.DataFrame):
        document = document.to_dict(orient="records")
    typer.echo(json.dumps(document, indent=2, default=JsonIO._default))


def _config(path: str, seed: Optional[int] = None, **overrides: Any) -> CacheConfig:
    config = CacheConfig.from_file(path)
    if seed is not None:
        overrides["seed"] = seed
    return config.with_overrides(**overrides) if overrides else config


def _split_capacity(config: CacheConfig, capacity: int) -> tuple[DirConfig, ...]:
    """Spreads a total capacity evenly over the configured directories."""
    n = len(config.dirs)
    return tuple(
        DirConfig(path=d.path, capacity_bytes=capacity // n + (1 if i < capacity % n else 0))
        for i, d in enumerate(config.dirs)
    )


# ------------------------------------------------------------------------------------------------ #
#                                         COMMANDS                                                 #
# ------------------------------------------------------------------------------------------------ #
@app.command("generate")
def generate_command(
    spec: str = typer.Option(..., "--spec", help="Workload spec document (YAML or JSON)."),
    out: str = typer.Option(..., "--out", help="Trace file to write."),
    seed: Optional[int] = typer.Option(None, "--seed", min=0, help="Overrides the workload seed."),
) -> None:
    """Generates a skewed read trace."""
    workload = ZipfWorkloadSpec.from_file(spec)
    if seed is not None:
        workload = replace(workload, seed=seed)
    trace = generate(workload)
    save_trace(trace, out)
    typer.echo(f"Wrote {len(trace)} requests to {out}.")


@app.command("replay")
def replay_command(
    trace: str = typer.Option(..., "--trace", help="Trace file."),
    config: str = typer.Option(..., "--config", help="Cache configuration document."),
    faults: Optional[str] = typer.Option(None, "--faults", help="Fault schedule document."),
    workers: int = typer.Option(1, "--workers", min=1, help="Concurrent clients."),
    seed: Optional[int] = typer.Option(None, "--seed", min=0, help="Content and cache seed."),
    object_size: Optional[int] = typer.Option(
        None, "--object-size", min=1, help="Size of every backing file."
    ),
    out: Optional[str] = typer.Option(None, "--out", help="Report file (JSON or YAML)."),
) -> None:
    """Replays a trace through a disk-backed cache and verifies every byte."""
    records = load_trace(trace)
    backing = SyntheticBackingStore.for_trace(records, seed=seed or 0, file_size=object_size)
    schedule = FaultSchedule.from_file(faults) if faults else None
    replayer = TraceReplayer(
        _config(config, seed), backing, faults=schedule, metrics=_metrics(), workers=workers
    )
    report = replayer.replay(records)
    _emit(report.to_document(), out)
    if not report.ok:
        typer.echo(f"{report.mismatches} byte mismatches.", err=True)
        raise typer.Exit(code=EXIT_MISMATCH)


@app.command("simulate")
def simulate_command(
    trace: str = typer.Option(..., "--trace", help="Trace file."),
    config: str = typer.Option(..., "--config", help="Cache configuration document."),
    policy: Optional[EvictionPolicyName] = typer.Option(None, "--policy", help="Eviction policy."),
    capacity: Optional[int] = typer.Option(None, "--capacity", min=1, help="Total bytes."),
    seed: Optional[int] = typer.Option(None, "--seed", min=0, help="Content and cache seed."),
    out: Optional[str] = typer.Option(None, "--out", help="Report file (JSON or YAML)."),
) -> None:
    """Simulates the cache in memory."""
    records = load_trace(trace)
    settings = _config(config, seed)
    overrides: dict[str, Any] = {}
    if policy is not None:
        overrides["eviction_policy"] = policy
    if capacity is not None:
        overrides["dirs"] = _split_capacity(settings, capacity)
    if overrides:
        settings = settings.with_overrides(**overrides)
    backing = SyntheticBackingStore.for_trace(records, seed=seed or 0)
    report = CacheSimulator(settings, backing).simulate(records)
    _emit(report.to_document(), out)


@app.command("schedule-sim")
def schedule_command(
    trace: str = typer.Option(..., "--trace", help="Trace file."),
    nodes: int = typer.Option(..., "--nodes", min=1, help="Worker count."),
    churn: Optional[str] = typer.Option(None, "--churn", help="Churn schedule document."),
    grace_s: float = typer.Option(600.0, "--grace-s", min=0, help="Offline grace period."),
    out: Optional[str] = typer.Option(None, "--out", help="Report file (JSON or YAML)."),
) -> None:
    """Places one split per trace record on a consistent-hash worker ring."""
    records = load_trace(trace)
    schedule = ChurnSchedule.from_file(churn) if churn else None
    report = simulate_schedule(records, nodes, schedule, grace_s=grace_s)
    _emit(report.to_document(), out)


@app.command("report")
def report_command(
    trace: str = typer.Option(..., "--trace", help="Trace file."),
    top_fraction: float = typer.Option(0.01, "--top-fraction", min=0.0, max=1.0),
    out: Optional[str] = typer.Option(None, "--out", help="Report file (JSON or YAML)."),
) -> None:
    """Characterises a trace: volume, skew and read sizes."""
    _emit(characterise(load_trace(trace), top_fraction=top_fraction), out)


@app.command("page-size-sweep")
def sweep_command(
    trace: str = typer.Option(..., "--trace", help="Trace file."),
    config: str = typer.Option(..., "--config", help="Cache configuration document."),
    page_sizes: str = typer.Option(DEFAULT_PAGE_SIZES, "--page-sizes", help="Comma separated."),
    seed: Optional[int] = typer.Option(None, "--seed", min=0, help="Content and cache seed."),
    out: Optional[str] = typer.Option(None, "--out", help="Table file (CSV, JSON or YAML)."),
) -> None:
    """Simulates the trace under several page sizes."""
    try:
        sizes = [int(s) for s in page_sizes.split(",") if s.strip()]
    except ValueError as e:
        raise typer.BadParameter(f"Invalid page sizes {page_sizes!r}.") from e
    records = load_trace(trace)
    backing = SyntheticBackingStore.for_trace(records, seed=seed or 0)
    _emit(page_size_sweep(records, _config(config, seed), backing, sizes), out)


# ------------------------------------------------------------------------------------------------ #
#                                        ENTRY POINT                                               #
# ------------------------------------------------------------------------------------------------ #
def run(args: Optional[list[str]] = None) -> int:
    """Runs the CLI and returns its exit code."""
    container = EdgeCacheContainer()
    container.init_resources()
    container.wire(modules=[__name__])
    try:
        code = app(args=args, standalone_mode=False)
    except click.exceptions.UsageError as e:
        e.show()
        return EXIT_USAGE
    except click.exceptions.Abort:
        return EXIT_USAGE
    except (ValueError, OSError, LookupError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        typer.echo(f"Error: {e}", err=True)
        return EXIT_USAGE
    finally:
        container.unwire()
    return code if isinstance(code, int) else EXIT_OK


def main() -> None:
    sys.exit(run())
