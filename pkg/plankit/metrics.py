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

"""Per-trial and aggregate evaluation metrics.

Success-conditioned metrics (path length, deviation, smoothness, clearance)
average over successful trials only and are 0 for a planner without any
success. Success rate, planning time, distance left and memory average over
all trials.
"""

from .core import (
    Cell,
    OccupancyGrid,
    InvalidDataError,
    Path,
    FREE,
    distance,
    path_length,
)
from .planning import PLANNER, STATUS, PlannerConfig, PlanResult
from .tasks import PlanningTask

from dataclasses import dataclass, fields
from typing import Dict, List, Optional, Sequence, Tuple
from scipy import ndimage
import numpy as np
import math
import logging

logger = logging.getLogger(__name__)


@dataclass
class TrialRecord:
    """One planner run on one map, with the metrics derived from it."""

    dataset_name: str
    task: PlanningTask
    config: PlannerConfig
    result: PlanResult
    path_length: float
    distance_left: float
    path_deviation: Optional[float] = None
    smoothness_rad_per_move: Optional[float] = None
    clearance_cells: Optional[float] = None
    preprocess_time_s: float = 0.0
    error: Optional[str] = None

    @property
    def planner_kind(self) -> PLANNER:
        return self.config.planner_kind

    @property
    def success(self) -> bool:
        return self.result.success

    @property
    def sort_key(self) -> Tuple[str, str, int]:
        return (
            self.dataset_name,
            self.task.grid_name,
            list(PLANNER).index(self.planner_kind),
        )

    def to_dict(self) -> Dict:
        task = self.task
        return {
            "dataset_name": self.dataset_name,
            "grid_name": task.grid_name,
            "planner": self.planner_kind.value,
            "task": {
                "start": list(task.start),
                "goal": list(task.goal),
                "budget_s": task.budget_s,
                "seed": task.seed,
            },
            "config": self.config.to_dict(),
            "result": self.result.to_dict(),
            "path_length": self.path_length,
            "distance_left": self.distance_left,
            "path_deviation": self.path_deviation,
            "smoothness_rad_per_move": self.smoothness_rad_per_move,
            "clearance_cells": self.clearance_cells,
            "preprocess_time_s": self.preprocess_time_s,
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "TrialRecord":
        task = data["task"]
        return cls(
            dataset_name=data["dataset_name"],
            task=PlanningTask(
                data["grid_name"],
                Cell(*task["start"]),
                Cell(*task["goal"]),
                float(task["budget_s"]),
                int(task["seed"]),
            ),
            config=PlannerConfig.from_dict(data["config"]),
            result=PlanResult.from_dict(data["result"]),
            path_length=float(data["path_length"]),
            distance_left=float(data["distance_left"]),
            path_deviation=data.get("path_deviation"),
            smoothness_rad_per_move=data.get("smoothness_rad_per_move"),
            clearance_cells=data.get("clearance_cells"),
            preprocess_time_s=float(data.get("preprocess_time_s", 0.0)),
            error=data.get("error"),
        )


@dataclass
class AggregateRow:
    planner_kind: PLANNER
    dataset_name: str
    success_rate_pct: float
    mean_path_length: float
    mean_planning_time_s: float
    mean_distance_left: float
    mean_path_deviation: float
    mean_smoothness: float
    mean_clearance: float
    mean_peak_memory_kib: float
    n_trials: int
    min_peak_memory_kib: float = 0.0
    max_peak_memory_kib: float = 0.0
    std_peak_memory_kib: float = 0.0
    min_smoothness: float = 0.0
    max_smoothness: float = 0.0
    std_smoothness: float = 0.0
    min_clearance: float = 0.0
    max_clearance: float = 0.0
    std_clearance: float = 0.0

    def to_dict(self) -> Dict:
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data["planner_kind"] = self.planner_kind.value
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "AggregateRow":
        values = dict(data)
        values["planner_kind"] = PLANNER(values["planner_kind"])
        return cls(**values)


def success_rate(records: Sequence[TrialRecord]) -> float:
    """Percentage of successful trials in a single dataset."""
    if not records:
        raise InvalidDataError("No records to compute a success rate from")
    datasets = {r.dataset_name for r in records}
    if len(datasets) > 1:
        raise InvalidDataError(f"Records span several datasets: {sorted(datasets)}")
    return 100.0 * sum(r.success for r in records) / len(records)


def distance_left(result: PlanResult, goal: Cell) -> float:
    """Straight-line distance from the last waypoint to the goal."""
    if result.success:
        return 0.0
    return distance(result.path[-1], goal)


def path_deviation(record: TrialRecord, astar_reference: TrialRecord) -> float:
    """Path length in excess of the A* path on the same task; may be negative."""
    if not (record.success and astar_reference.success):
        raise InvalidDataError("Path deviation needs two successful trials")
    if (record.task.start, record.task.goal) != (
        astar_reference.task.start,
        astar_reference.task.goal,
    ):
        raise InvalidDataError("Path deviation needs trials on the same task")
    return record.path_length - astar_reference.path_length


def smoothness(path: Path) -> float:
    """Mean absolute heading change per interior waypoint, in radians."""
    if not path:
        raise InvalidDataError("Path is empty")
    points = [path[0]]
    for p in path[1:]:
        if tuple(p) != tuple(points[-1]):
            points.append(p)
    if len(points) < 3:
        return 0.0
    steps = np.diff(np.asarray(points, dtype=np.float64), axis=0)
    headings = np.arctan2(steps[:, 0], steps[:, 1])
    turns = np.abs((np.diff(headings) + math.pi) % (2 * math.pi) - math.pi)
    return float(np.mean(turns))


def clearance_map(grid: OccupancyGrid) -> np.ndarray:
    """Euclidean distance from each cell to the nearest occupied cell.

    Everything outside the grid counts as occupied.
    """
    free = np.pad(grid.cells == FREE, 1, mode="constant", constant_values=False)
    return ndimage.distance_transform_edt(free)[1:-1, 1:-1]


def obstacle_clearance(
    grid: OccupancyGrid, path: Path, clearance: Optional[np.ndarray] = None
) -> float:
    """Mean distance from the path waypoints to the nearest obstacle.

    A precomputed clearance_map may be passed when scoring many paths.
    """
    if not path:
        raise InvalidDataError("Path is empty")
    if clearance is None:
        clearance = clearance_map(grid)
    rows, cols = zip(*path)
    return float(np.mean(clearance[list(rows), list(cols)]))


def evaluate_trial(
    dataset_name: str,
    grid: OccupancyGrid,
    task: PlanningTask,
    config: PlannerConfig,
    result: PlanResult,
    preprocess_time_s: float = 0.0,
    error: Optional[str] = None,
    clearance: Optional[np.ndarray] = None,
) -> TrialRecord:
    """Build a record, computing the metrics that depend on this trial alone."""
    record = TrialRecord(
        dataset_name=dataset_name,
        task=task,
        config=config,
        result=result,
        path_length=path_length(result.path),
        distance_left=distance_left(result, task.goal),
        preprocess_time_s=preprocess_time_s,
        error=error,
    )
    if result.success:
        record.smoothness_rad_per_move = smoothness(result.path)
        record.clearance_cells = obstacle_clearance(grid, result.path, clearance)
    return record


def attach_deviations(records: Sequence[TrialRecord]) -> None:
    """Fill in path_deviation against the A* trial on the same map."""
    references = {
        (r.dataset_name, r.task.grid_name): r
        for r in records
        if r.planner_kind == PLANNER.ASTAR
    }
    for record in records:
        ref = references.get((record.dataset_name, record.task.grid_name))
        if ref is not None and ref.success and record.success:
            record.path_deviation = path_deviation(record, ref)
        else:
            record.path_deviation = None


def _spread(values: List[float]) -> Tuple[float, float, float, float]:
    if not values:
        return 0.0, 0.0, 0.0, 0.0
    arr = np.asarray(values, dtype=np.float64)
    return float(arr.mean()), float(arr.min()), float(arr.max()), float(arr.std())


def _mean(values: List[float]) -> float:
    return math.fsum(values) / len(values) if values else 0.0


def aggregate(records: Sequence[TrialRecord]) -> List[AggregateRow]:
    """One row per (dataset, planner), datasets by name, planners in canonical order."""
    groups: Dict[Tuple[str, PLANNER], List[TrialRecord]] = {}
    for r in records:
        groups.setdefault((r.dataset_name, r.planner_kind), []).append(r)

    order = list(PLANNER)
    rows = []
    for (dataset, kind), group in sorted(
        groups.items(), key=lambda kv: (kv[0][0], order.index(kv[0][1]))
    ):
        ok = [r for r in group if r.success]
        memory = _spread([r.result.peak_memory_kib for r in group])
        smooth = _spread([r.smoothness_rad_per_move or 0.0 for r in ok])
        clear = _spread([r.clearance_cells or 0.0 for r in ok])
        rows.append(
            AggregateRow(
                planner_kind=kind,
                dataset_name=dataset,
                success_rate_pct=success_rate(group),
                mean_path_length=_mean([r.path_length for r in ok]),
                mean_planning_time_s=_mean([r.result.planning_time_s for r in group]),
                mean_distance_left=_mean([r.distance_left for r in group]),
                mean_path_deviation=_mean(
                    [r.path_deviation for r in ok if r.path_deviation is not None]
                ),
                mean_smoothness=smooth[0],
                mean_clearance=clear[0],
                mean_peak_memory_kib=memory[0],
                n_trials=len(group),
                min_peak_memory_kib=memory[1],
                max_peak_memory_kib=memory[2],
                std_peak_memory_kib=memory[3],
                min_smoothness=smooth[1],
                max_smoothness=smooth[2],
                std_smoothness=smooth[3],
                min_clearance=clear[1],
                max_clearance=clear[2],
                std_clearance=clear[3],
            )
        )
    logger.debug("Aggregated %d records into %d rows", len(records), len(rows))
    return rows


def status_counts(records: Sequence[TrialRecord]) -> Dict[STATUS, int]:
    counts = {s: 0 for s in STATUS}
    for r in records:
        counts[r.result.status] += 1
    return counts
