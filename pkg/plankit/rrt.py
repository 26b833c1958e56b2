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

"""Rapidly-exploring random trees.

Samples are drawn in continuous (row, col) coordinates over the grid
rectangle. Each extension steps at most epsilon cells from the nearest tree
node and is snapped to the center of the cell it lands in, so tree nodes and
returned paths are always cells. An extension is kept only if the segment to
it has line of sight.
"""

from .core import (
    Cell,
    OccupancyGrid,
    InvalidDataError,
    Path,
    is_free,
    line_of_sight,
    distance,
)
from .planning import PlannerConfig, PlanResult, Deadline, STATUS
from .tasks import PlanningTask

from typing import Callable, Dict, Iterable, List, Optional, Set, Tuple
import numpy as np
import math
import logging

logger = logging.getLogger(__name__)


Point = Tuple[float, float]
Sampler = Callable[[], Point]


class _Tree:
    """Nodes in insertion order; a parent always precedes its children."""

    def __init__(self, root: Cell):
        self.cells: List[Cell] = []
        self.parents: List[int] = []
        self.index: Dict[Cell, int] = {}
        self._coords = np.empty((64, 2), dtype=np.float64)
        self.add(root, -1)

    def __len__(self):
        return len(self.cells)

    def __contains__(self, cell):
        return cell in self.index

    @property
    def root(self) -> Cell:
        return self.cells[0]

    def add(self, cell: Cell, parent: int) -> int:
        n = len(self.cells)
        if n == len(self._coords):
            self._coords = np.resize(self._coords, (2 * n, 2))
        self._coords[n] = cell
        self.cells.append(cell)
        self.parents.append(parent)
        self.index[cell] = n
        return n

    def nearest(self, point: Point) -> int:
        """Index of the node closest to point, the oldest one on ties."""
        coords = self._coords[: len(self.cells)]
        d2 = (coords[:, 0] - point[0]) ** 2 + (coords[:, 1] - point[1]) ** 2
        return int(np.argmin(d2))

    def nearest_to(self, cell: Cell) -> int:
        return self.nearest((float(cell[0]), float(cell[1])))

    def branch(self, idx: int) -> Path:
        """Cells from the root to node idx."""
        path = []
        while idx >= 0:
            path.append(self.cells[idx])
            idx = self.parents[idx]
        path.reverse()
        return path

    def descendants(self, roots: Iterable[int]) -> Set[int]:
        removed = set(roots)
        # Parents precede children, so one forward pass closes the set
        for i in range(len(self.cells)):
            if self.parents[i] in removed:
                removed.add(i)
        return removed

    def prune(self, roots: Iterable[int]) -> int:
        """Remove the given nodes with their subtrees; returns the count removed."""
        removed = self.descendants(roots)
        if not removed:
            return 0
        if 0 in removed:
            raise InvalidDataError("Cannot remove the root of a tree")
        keep = [i for i in range(len(self.cells)) if i not in removed]
        remap = {old: new for new, old in enumerate(keep)}
        remap[-1] = -1
        cells = [self.cells[i] for i in keep]
        parents = [remap[self.parents[i]] for i in keep]
        self.cells, self.parents, self.index = [], [], {}
        self._coords = np.empty((max(64, len(cells)), 2), dtype=np.float64)
        for cell, parent in zip(cells, parents):
            self.add(cell, parent)
        return len(removed)

    def is_consistent(self) -> bool:
        return self.parents[0] == -1 and all(
            0 <= p < i for i, p in enumerate(self.parents) if i > 0
        )


def _to_cell(grid: OccupancyGrid, point: Point) -> Cell:
    row = min(max(math.floor(point[0] + 0.5), 0), grid.height - 1)
    col = min(max(math.floor(point[1] + 0.5), 0), grid.width - 1)
    return Cell(row, col)


def steer(grid: OccupancyGrid, near: Cell, target: Point, epsilon: float) -> Cell:
    """Move from near toward target by at most epsilon, snapped to a cell."""
    d_row, d_col = target[0] - near[0], target[1] - near[1]
    d = math.hypot(d_row, d_col)
    if d <= epsilon:
        return _to_cell(grid, target)
    scale = epsilon / d
    return _to_cell(grid, (near[0] + scale * d_row, near[1] + scale * d_col))


def _uniform_sampler(grid: OccupancyGrid, rng: np.random.Generator) -> Sampler:
    def sample() -> Point:
        return (
            float(rng.uniform(-0.5, grid.height - 0.5)),
            float(rng.uniform(-0.5, grid.width - 0.5)),
        )

    return sample


def _biased_sampler(
    rng: np.random.Generator, uniform: Sampler, target: Cell, bias: float
) -> Sampler:
    def sample() -> Point:
        if rng.random() < bias:
            return float(target[0]), float(target[1])
        return uniform()

    return sample


def _extend(
    grid: OccupancyGrid, tree: _Tree, target: Point, epsilon: float
) -> Optional[int]:
    """Grow tree one step toward target, returning the new node if any."""
    near = tree.nearest(target)
    cell = steer(grid, tree.cells[near], target, epsilon)
    if cell in tree:
        return None
    if not line_of_sight(grid, tree.cells[near], cell):
        return None
    return tree.add(cell, near)


def _blocked(grid: OccupancyGrid, task: PlanningTask) -> Optional[PlanResult]:
    if not (is_free(grid, task.start) and is_free(grid, task.goal)):
        logger.debug("Start or goal occupied on %r", grid.name)
        return PlanResult(STATUS.NO_PATH, [task.start])
    if task.start == task.goal:
        return PlanResult(STATUS.SUCCESS, [task.start])
    return None


def _partial(tree: _Tree, goal: Cell) -> Path:
    best = min(range(len(tree)), key=lambda i: (distance(tree.cells[i], goal), i))
    return tree.branch(best)


def _grow(
    grid: OccupancyGrid,
    tree: _Tree,
    goal: Cell,
    cfg: PlannerConfig,
    sample: Sampler,
    deadline: Deadline,
) -> PlanResult:
    tolerance = cfg.resolved_goal_tolerance
    for iteration in range(1, cfg.max_iterations + 1):
        if deadline.expired():
            return PlanResult(
                STATUS.TIMEOUT, _partial(tree, goal), iterations=iteration - 1
            )
        idx = _extend(grid, tree, sample(), cfg.epsilon)
        if idx is None:
            continue
        cell = tree.cells[idx]
        if distance(cell, goal) <= tolerance and line_of_sight(grid, cell, goal):
            path = tree.branch(idx)
            if cell != goal:
                path.append(goal)
            return PlanResult(STATUS.SUCCESS, path, iterations=iteration)
    return PlanResult(
        STATUS.EXHAUSTED, _partial(tree, goal), iterations=cfg.max_iterations
    )


def plan_rrt(
    grid: OccupancyGrid, task: PlanningTask, cfg: PlannerConfig, deadline: Deadline
) -> PlanResult:
    blocked = _blocked(grid, task)
    if blocked:
        return blocked
    rng = np.random.default_rng(cfg.seed)
    sample = _biased_sampler(
        rng, _uniform_sampler(grid, rng), task.goal, cfg.goal_bias
    )
    tree = _Tree(task.start)
    result = _grow(grid, tree, task.goal, cfg, sample, deadline)
    logger.debug(
        "RRT on %r: %s after %d iterations, %d nodes",
        grid.name,
        result.status,
        result.iterations,
        len(tree),
    )
    return result


def _connect(
    grid: OccupancyGrid, tree: _Tree, target: Cell, epsilon: float, deadline: Deadline
) -> bool:
    """Step tree toward target until blocked or joined."""
    point = (float(target[0]), float(target[1]))
    current = tree.nearest(point)
    visited = {current}
    while tree.cells[current] != target:
        if deadline.expired():
            return False
        cell = steer(grid, tree.cells[current], point, epsilon)
        if cell in tree:
            current = tree.index[cell]
            if current in visited:
                return False
            visited.add(current)
            continue
        if not line_of_sight(grid, tree.cells[current], cell):
            return False
        current = tree.add(cell, current)
    return True


def plan_rrt_connect(
    grid: OccupancyGrid, task: PlanningTask, cfg: PlannerConfig, deadline: Deadline
) -> PlanResult:
    """Bidirectional RRT, alternating which tree extends and which connects.

    Goal-biased samples pull each tree toward the root of the other one.
    """
    blocked = _blocked(grid, task)
    if blocked:
        return blocked
    rng = np.random.default_rng(cfg.seed)
    uniform = _uniform_sampler(grid, rng)
    start_tree, goal_tree = _Tree(task.start), _Tree(task.goal)
    trees = [(start_tree, goal_tree), (goal_tree, start_tree)]

    for iteration in range(1, cfg.max_iterations + 1):
        if deadline.expired():
            return PlanResult(
                STATUS.TIMEOUT,
                _partial(start_tree, task.goal),
                iterations=iteration - 1,
            )
        grown, other = trees[(iteration - 1) % 2]
        if rng.random() < cfg.goal_bias:
            root = other.root
            target: Point = (float(root[0]), float(root[1]))
        else:
            target = uniform()
        idx = _extend(grid, grown, target, cfg.epsilon)
        if idx is None:
            continue
        meet = grown.cells[idx]
        if _connect(grid, other, meet, cfg.epsilon, deadline):
            head = start_tree.branch(start_tree.index[meet])
            tail = goal_tree.branch(goal_tree.index[meet])
            path = head + tail[-2::-1]
            logger.debug(
                "RRT-Connect on %r joined after %d iterations", grid.name, iteration
            )
            return PlanResult(STATUS.SUCCESS, path, iterations=iteration)

    return PlanResult(
        STATUS.EXHAUSTED,
        _partial(start_tree, task.goal),
        iterations=cfg.max_iterations,
    )


class DynamicRrt:
    """RRT that keeps its tree and a waypoint cache between planning calls.

    When cells become blocked, the affected part of the tree is trimmed and
    growth resumes, with samples drawn from the cached waypoints of the last
    solution with probability waypoint_bias.
    """

    def __init__(self, grid: OccupancyGrid, task: PlanningTask, cfg: PlannerConfig):
        self.grid = grid
        self.task = task
        self.cfg = cfg
        self.tree = _Tree(task.start)
        self.waypoints: List[Cell] = []
        self._rng = np.random.default_rng(cfg.seed)
        self._uniform = _uniform_sampler(grid, self._rng)

    def _sample(self) -> Point:
        r = self._rng.random()
        if r < self.cfg.goal_bias:
            return float(self.task.goal[0]), float(self.task.goal[1])
        if self.waypoints and r < self.cfg.goal_bias + self.cfg.waypoint_bias:
            cell = self.waypoints[int(self._rng.integers(len(self.waypoints)))]
            return float(cell[0]), float(cell[1])
        return self._uniform()

    def plan(self, deadline: Deadline) -> PlanResult:
        blocked = _blocked(self.grid, self.task)
        if blocked:
            return blocked
        result = _grow(
            self.grid, self.tree, self.task.goal, self.cfg, self._sample, deadline
        )
        if result.success:
            self.waypoints = list(result.path[1:-1])
        logger.debug(
            "Dynamic RRT on %r: %s, %d nodes, %d cached waypoints",
            self.grid.name,
            result.status,
            len(self.tree),
            len(self.waypoints),
        )
        return result

    def invalidate(self, cells: Iterable[Cell]) -> int:
        """Drop tree nodes on the given cells together with their subtrees."""
        blocked = {Cell(*c) for c in cells}
        hit = [self.tree.index[c] for c in sorted(blocked) if c in self.tree]
        if 0 in hit:
            raise InvalidDataError("Cannot invalidate the start of the tree")
        removed = self.tree.prune(hit)
        self.waypoints = [w for w in self.waypoints if w not in blocked]
        return removed

    def replan(self, grid: OccupancyGrid, deadline: Deadline) -> PlanResult:
        """Adopt an updated grid, trim edges it blocks and regrow."""
        self.grid = grid
        self._uniform = _uniform_sampler(grid, self._rng)
        if not is_free(grid, self.task.start):
            return PlanResult(STATUS.NO_PATH, [self.task.start])
        tree = self.tree
        stale = [
            i
            for i in range(1, len(tree))
            if not line_of_sight(grid, tree.cells[tree.parents[i]], tree.cells[i])
        ]
        removed = tree.prune(stale)
        self.waypoints = [w for w in self.waypoints if is_free(grid, w)]
        logger.debug("Trimmed %d nodes before replanning on %r", removed, grid.name)
        return self.plan(deadline)


def plan_dynamic_rrt(
    grid: OccupancyGrid, task: PlanningTask, cfg: PlannerConfig, deadline: Deadline
) -> PlanResult:
    return DynamicRrt(grid, task, cfg).plan(deadline)
