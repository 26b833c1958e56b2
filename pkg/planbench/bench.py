# Copyright (c) 2025 The planbench developers
# All rights reserved.
#
#   Redistribution and use in source and binary forms, with or
#   without modification, are permitted provided that the following
#   conditions are met:
#
#    1. Redistributions of source code must retain the above copyright
#       notice, this list of conditions and the following disclaimer.
#    2. Redistributions in binary form must reproduce the above
#       copyright notice, this list of conditions and the following
#       disclaimer in the documentation and/or other materials provided
#       with the distribution.
#
# THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND CONTRIBUTORS
# "AS IS" AND ANY EXPRESS OR IMPLIED WARRANTIES, INCLUDING, BUT NOT
# LIMITED TO, THE IMPLIED WARRANTIES OF MERCHANTABILITY AND FITNESS
# FOR A PARTICULAR PURPOSE ARE DISCLAIMED. IN NO EVENT SHALL THE
# COPYRIGHT HOLDER OR CONTRIBUTORS BE LIABLE FOR ANY DIRECT, INDIRECT,
# INCIDENTAL, SPECIAL, EXEMPLARY, OR CONSEQUENTIAL DAMAGES (INCLUDING,
# BUT NOT LIMITED TO, PROCUREMENT OF SUBSTITUTE GOODS OR SERVICES;
# LOSS OF USE, DATA, OR PROFITS; OR BUSINESS INTERRUPTION) HOWEVER
# CAUSED AND ON ANY THEORY OF LIABILITY, WHETHER IN CONTRACT, STRICT
# LIABILITY, OR TORT (INCLUDING NEGLIGENCE OR OTHERWISE) ARISING IN
# ANY WAY OUT OF THE USE OF THIS SOFTWARE, EVEN IF ADVISED OF THE
# POSSIBILITY OF SUCH DAMAGE.

"""Dataset-scale benchmark runs.

Every (map, planner) pair is planned exactly once. Planners stop themselves at
the task budget; a watchdog abandons any trial still running after the
budget plus a slack, so one runaway planner can't stall the run.
"""

from plankit.core import FormatError, InvalidDataError, OccupancyGrid
from plankit.core.io import read_grid
from plankit.metrics import (
    TrialRecord,
    aggregate,
    attach_deviations,
    clearance_map,
    evaluate_trial,
)
from plankit.planning import (
    STATUS,
    Deadline,
    PlannerConfig,
    PlanResult,
    plan,
)
from plankit.tasks import PlanningTask, load_tasks

from .diagnostics import get_fingerprint
from .overlay import render_overlay
from .report import BenchmarkReport, REPORT_FORMAT, emit_report, format_records

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union
import numpy as np
import threading
import time
import json
import logging

logger = logging.getLogger(__name__)


WATCHDOG_SLACK_S = 5.0

# Trial threads the watchdog gave up on. They may still be running and can
# start or stop tracemalloc under a later trial.
_abandoned: List[threading.Thread] = []


def _stragglers() -> int:
    _abandoned[:] = [t for t in _abandoned if t.is_alive()]
    return len(_abandoned)


@dataclass
class MapEntry:
    grid: Path
    task: Optional[Path] = None


@dataclass
class DatasetManifest:
    """A named set of grid files, each optionally with its own task file.

    Relative paths in the manifest file are resolved against its directory.
    """

    dataset_name: str
    entries: List[MapEntry]
    format_notes: str = ""
    provenance: str = ""
    path: Optional[Path] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dataset_name": self.dataset_name,
            "provenance": self.provenance,
            "format_notes": self.format_notes,
            "maps": [
                {"grid": str(e.grid), "task": str(e.task) if e.task else None}
                for e in self.entries
            ],
        }


def load_manifest(path: Union[str, Path]) -> DatasetManifest:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as e:
        raise FormatError(f"Unable to read manifest: {e.strerror}", path)
    except ValueError as e:
        raise FormatError(f"Invalid manifest JSON: {e}", path)

    base = path.parent
    try:
        name = str(data["dataset_name"])
        entries = [
            MapEntry(
                base / m["grid"], base / m["task"] if m.get("task") else None
            )
            for m in data["maps"]
        ]
    except (KeyError, TypeError) as e:
        raise FormatError(f"Invalid manifest, missing {e}", path)
    if not entries:
        raise FormatError("Manifest lists no maps", path)
    for e in entries:
        for ref in (e.grid, e.task):
            if ref is not None and not ref.is_file():
                raise FormatError(f"Referenced file not found: {ref}", path)
    return DatasetManifest(
        name,
        entries,
        data.get("format_notes", ""),
        data.get("provenance", ""),
        path,
    )


@dataclass
class LoadedMap:
    grid: OccupancyGrid
    preprocess_time_s: float


def load_maps(manifest: DatasetManifest) -> Dict[str, LoadedMap]:
    """Read every grid of a manifest, keyed by grid name in manifest order."""
    maps: Dict[str, LoadedMap] = {}
    for entry in manifest.entries:
        t0 = time.perf_counter()
        grid = read_grid(entry.grid)
        elapsed = time.perf_counter() - t0
        if grid.name in maps:
            raise FormatError(f"Duplicate grid name {grid.name!r}", manifest.path)
        maps[grid.name] = LoadedMap(grid, elapsed)
    logger.info("Loaded %d maps of dataset %r", len(maps), manifest.dataset_name)
    return maps


def manifest_tasks(manifest: DatasetManifest) -> List[PlanningTask]:
    """Tasks from the task files referenced by the manifest entries."""
    tasks: List[PlanningTask] = []
    for entry in manifest.entries:
        if entry.task is not None:
            tasks.extend(load_tasks(entry.task))
    return tasks


def _match_tasks(
    maps: Dict[str, LoadedMap], tasks: Sequence[PlanningTask]
) -> Dict[str, PlanningTask]:
    by_grid: Dict[str, PlanningTask] = {}
    for t in tasks:
        if t.grid_name in maps:
            if t.grid_name in by_grid and by_grid[t.grid_name] != t:
                raise InvalidDataError(f"Several tasks for grid {t.grid_name!r}")
            by_grid[t.grid_name] = t
    missing = [name for name in maps if name not in by_grid]
    if missing:
        raise InvalidDataError(f"No task for grids: {', '.join(missing)}")
    return by_grid


def run_trial(
    dataset_name: str,
    grid: OccupancyGrid,
    task: PlanningTask,
    cfg: PlannerConfig,
    preprocess_time_s: float = 0.0,
    watchdog_slack_s: float = WATCHDOG_SLACK_S,
    track_memory: bool = True,
    clearance: Optional[np.ndarray] = None,
) -> TrialRecord:
    """Plan one task with one planner under the watchdog; never raises."""
    if track_memory and _stragglers():
        logger.warning(
            "%d abandoned trial(s) still running, not tracking memory for %s / %s",
            len(_abandoned),
            grid.name,
            cfg.planner_kind,
        )
        track_memory = False
    deadline = Deadline(task.budget_s)
    outcome: Dict[str, Any] = {}

    def target():
        try:
            outcome["result"] = plan(grid, task, cfg, deadline, track_memory)
        except Exception as e:
            outcome["error"] = e

    logger.info("Trial %s / %s: start", grid.name, cfg.planner_kind)
    t0 = time.perf_counter()
    worker = threading.Thread(
        target=target, name=f"{grid.name}-{cfg.planner_kind}", daemon=True
    )
    worker.start()
    worker.join(task.budget_s + watchdog_slack_s)

    error = None
    if worker.is_alive():
        deadline.cancel.set()
        _abandoned.append(worker)
        elapsed = time.perf_counter() - t0
        logger.warning(
            "Watchdog fired for %s / %s after %.1f s",
            grid.name,
            cfg.planner_kind,
            elapsed,
        )
        result = PlanResult(STATUS.TIMEOUT, [task.start], planning_time_s=elapsed)
        error = "Planner ignored its deadline and was abandoned"
    elif "error" in outcome:
        e = outcome["error"]
        logger.error("Trial %s / %s failed", grid.name, cfg.planner_kind, exc_info=e)
        result = PlanResult(
            STATUS.ERROR, [task.start], planning_time_s=time.perf_counter() - t0
        )
        error = f"{type(e).__name__}: {e}"
    else:
        result = outcome["result"]

    logger.info(
        "Trial %s / %s: %s in %.3f s",
        grid.name,
        cfg.planner_kind,
        result.status,
        result.planning_time_s,
    )
    return evaluate_trial(
        dataset_name,
        grid,
        task,
        cfg,
        result,
        preprocess_time_s=preprocess_time_s,
        error=error,
        clearance=clearance,
    )


def _run_map(
    dataset_name: str,
    loaded: LoadedMap,
    task: PlanningTask,
    configs: Sequence[PlannerConfig],
    watchdog_slack_s: float,
    track_memory: bool,
) -> List[TrialRecord]:
    clearance = clearance_map(loaded.grid)
    return [
        run_trial(
            dataset_name,
            loaded.grid,
            task,
            cfg,
            loaded.preprocess_time_s,
            watchdog_slack_s,
            track_memory,
            clearance,
        )
        for cfg in configs
    ]


def config_snapshot(
    configs: Sequence[PlannerConfig],
    tasks: Sequence[PlanningTask],
    workers: int,
    watchdog_slack_s: float,
    track_memory: bool,
) -> Dict[str, Any]:
    budgets = sorted({t.budget_s for t in tasks})
    return {
        "planners": [c.to_dict() for c in configs],
        "budget_s": budgets[0] if len(budgets) == 1 else budgets,
        "task_seeds": sorted({t.seed for t in tasks}),
        "workers": workers,
        "watchdog_slack_s": watchdog_slack_s,
        "track_memory": track_memory,
    }


def run_benchmark(
    manifest: DatasetManifest,
    planner_configs: Sequence[PlannerConfig],
    tasks: Sequence[PlanningTask],
    maps: Optional[Dict[str, LoadedMap]] = None,
    workers: int = 1,
    watchdog_slack_s: float = WATCHDOG_SLACK_S,
    track_memory: bool = True,
) -> BenchmarkReport:
    """Run every planner on every map of the manifest.

    With workers > 1, maps are spread over a process pool; the planners of one
    map always run one after the other in the same worker.
    """
    if not planner_configs:
        raise InvalidDataError("No planners to benchmark")
    kinds = [c.planner_kind for c in planner_configs]
    if len(set(kinds)) != len(kinds):
        raise InvalidDataError("Each planner may only be configured once")
    if workers < 1:
        raise InvalidDataError(f"workers must be at least 1, got {workers}")
    if maps is None:
        maps = load_maps(manifest)
    by_grid = _match_tasks(maps, tasks)

    name = manifest.dataset_name
    records: List[TrialRecord] = []
    if workers == 1:
        for grid_name, loaded in maps.items():
            records.extend(
                _run_map(
                    name,
                    loaded,
                    by_grid[grid_name],
                    planner_configs,
                    watchdog_slack_s,
                    track_memory,
                )
            )
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(
                    _run_map,
                    name,
                    loaded,
                    by_grid[grid_name],
                    list(planner_configs),
                    watchdog_slack_s,
                    track_memory,
                )
                for grid_name, loaded in maps.items()
            ]
            for future in futures:
                records.extend(future.result())

    records.sort(key=lambda r: r.sort_key)
    attach_deviations(records)
    snapshot = config_snapshot(
        planner_configs, list(by_grid.values()), workers, watchdog_slack_s, track_memory
    )
    snapshot["dataset"] = manifest.to_dict()
    return BenchmarkReport(
        config=snapshot,
        records=records,
        aggregates=aggregate(records),
        fingerprint=get_fingerprint(),
    )


def write_outputs(
    report: BenchmarkReport,
    out_dir: Union[str, Path],
    maps: Optional[Dict[str, LoadedMap]] = None,
) -> List[Path]:
    """Write records, aggregates, reports and per-trial overlays into out_dir."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    records_path = out_dir / "records.jsonl"
    records_path.write_text(format_records(report.records))
    written.append(records_path)
    for fmt, fname in (
        (REPORT_FORMAT.CSV, "aggregates.csv"),
        (REPORT_FORMAT.MARKDOWN, "report.md"),
        (REPORT_FORMAT.JSON, "report.json"),
    ):
        emit_report(report, fmt, out_dir / fname)
        written.append(out_dir / fname)

    if maps:
        overlays = out_dir / "overlays"
        overlays.mkdir(exist_ok=True)
        for r in report.records:
            loaded = maps.get(r.task.grid_name)
            if loaded is None:
                continue
            dest = overlays / f"{r.task.grid_name}_{r.planner_kind.value}.svg"
            render_overlay(
                loaded.grid,
                [(r.planner_kind.value, r.result.path)],
                dest,
                start=r.task.start,
                goal=r.task.goal,
            )
            written.append(dest)
    logger.info("Wrote %d files to %s", len(written), out_dir)
    return written

