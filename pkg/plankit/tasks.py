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

"""Start/goal selection and the task CSV format."""

from .core import (
    Cell,
    OccupancyGrid,
    FormatError,
    InvalidDataError,
    NoFreeSpaceError,
    FREE,
    neighbors,
)

from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Sequence, Set, Tuple, Union
from scipy import ndimage
import numpy as np
import csv
import io
import logging

logger = logging.getLogger(__name__)


DEFAULT_BUDGET_S = 60.0

TASK_COLUMNS = (
    "grid_name",
    "start_row",
    "start_col",
    "goal_row",
    "goal_col",
    "budget_s",
    "seed",
)


@dataclass(frozen=True)
class PlanningTask:
    grid_name: str
    start: Cell
    goal: Cell
    budget_s: float = DEFAULT_BUDGET_S
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "start", Cell(*self.start))
        object.__setattr__(self, "goal", Cell(*self.goal))
        if not self.budget_s > 0:
            raise InvalidDataError(f"Budget must be positive, got {self.budget_s}")
        if self.seed < 0:
            raise InvalidDataError(f"Seed must be unsigned, got {self.seed}")

    @property
    def degenerate(self) -> bool:
        """True when start and goal coincide (single-cell free space)."""
        return self.start == self.goal


def _component_labels(grid: OccupancyGrid) -> Tuple[np.ndarray, int]:
    # Without corner cutting, 8-connected reachability equals 4-connectivity.
    return ndimage.label(grid.cells == FREE)


def largest_free_component(grid: OccupancyGrid) -> Set[Cell]:
    """The largest connected region of free cells.

    Ties go to the component whose first cell in row-major order comes first.
    """
    labels, count = _component_labels(grid)
    if count == 0:
        raise NoFreeSpaceError(grid.name)
    sizes = np.bincount(labels.ravel())[1:]
    # ndimage numbers components in raster scan order; argmax picks the first.
    best = int(np.argmax(sizes)) + 1
    return {Cell(int(r), int(c)) for r, c in zip(*np.nonzero(labels == best))}


def _bfs_farthest(grid: OccupancyGrid, source: Cell) -> Tuple[Cell, int]:
    """Farthest cell from source by hop count, lowest row-major index on ties."""
    hops: Dict[Cell, int] = {source: 0}
    queue = deque([source])
    best, best_hops = source, 0
    while queue:
        cell = queue.popleft()
        h = hops[cell]
        if h > best_hops or (h == best_hops and cell < best):
            best, best_hops = cell, h
        for n, _ in neighbors(grid, cell):
            if n not in hops:
                hops[n] = h + 1
                queue.append(n)
    return best, best_hops


def sample_task(
    grid: OccupancyGrid, seed: int, budget_s: float = DEFAULT_BUDGET_S
) -> PlanningTask:
    """Pick a far-apart start/goal pair inside the largest free component.

    A seeded random cell of the component starts a BFS; its farthest cell u
    starts a second BFS whose farthest cell v becomes the goal, with u as the
    start.
    """
    component = sorted(largest_free_component(grid))
    rng = np.random.default_rng(seed)
    origin = component[int(rng.integers(len(component)))]
    start, _ = _bfs_farthest(grid, origin)
    goal, hops = _bfs_farthest(grid, start)
    logger.debug(
        "Sampled task on %r: %s -> %s (%d hops)", grid.name, start, goal, hops
    )
    return PlanningTask(grid.name, start, goal, budget_s, seed)


def format_tasks(tasks: Sequence[PlanningTask]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TASK_COLUMNS)
    for t in tasks:
        writer.writerow(
            [
                t.grid_name,
                t.start.row,
                t.start.col,
                t.goal.row,
                t.goal.col,
                repr(float(t.budget_s)),
                t.seed,
            ]
        )
    return buf.getvalue()


def save_tasks(path: Union[str, Path], tasks: Sequence[PlanningTask]) -> None:
    Path(path).write_text(format_tasks(tasks))


def parse_tasks(text: str, path=None) -> List[PlanningTask]:
    tasks: List[PlanningTask] = []
    reader = csv.reader(io.StringIO(text))
    header = None
    for row in reader:
        lineno = reader.line_num
        if not row or not any(v.strip() for v in row):
            continue
        if header is None:
            header = [v.strip() for v in row]
            missing = [c for c in TASK_COLUMNS if c not in header]
            if missing:
                raise FormatError(f"Missing columns: {', '.join(missing)}", path, 1)
            continue
        if len(row) != len(header):
            raise FormatError(
                f"Expected {len(header)} fields, got {len(row)}", path, lineno
            )
        values = dict(zip(header, row))
        try:
            tasks.append(
                PlanningTask(
                    values["grid_name"],
                    Cell(int(values["start_row"]), int(values["start_col"])),
                    Cell(int(values["goal_row"]), int(values["goal_col"])),
                    float(values["budget_s"]),
                    int(values["seed"]),
                )
            )
        except ValueError as e:
            raise FormatError(f"Invalid task: {e}", path, lineno)
    return tasks


def load_tasks(path: Union[str, Path]) -> List[PlanningTask]:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise FormatError(f"Unable to read tasks: {e.strerror}", path)
    return parse_tasks(text, path)
