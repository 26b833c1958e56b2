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

"""Label-setting graph search over the 8-connected grid.

Dijkstra and A* keep path costs as (orthogonal moves, diagonal moves) integer
pairs, so two optimal paths always produce the same floating point cost.
Theta* is the lazy variant: line of sight to the grandparent is assumed when a
cell is generated and only checked when it is expanded.
"""

from .core import (
    Cell,
    OccupancyGrid,
    Path,
    SQRT2,
    is_free,
    neighbors,
    line_of_sight,
    distance,
)
from .planning import PlannerConfig, PlanResult, Deadline, STATUS
from .tasks import PlanningTask

from typing import Callable, Dict, Iterable, Set, Tuple
import heapq
import math
import logging

logger = logging.getLogger(__name__)


Heuristic = Callable[[Cell, Cell], float]


def octile(a: Cell, b: Cell) -> float:
    """Exact shortest distance on an obstacle-free 8-connected grid."""
    dr, dc = abs(a[0] - b[0]), abs(a[1] - b[1])
    return max(dr, dc) + (SQRT2 - 1) * min(dr, dc)


def _zero(a: Cell, b: Cell) -> float:
    return 0.0


def _trace(parents: Dict[Cell, Cell], end: Cell) -> Path:
    path = [end]
    while parents[path[-1]] != path[-1]:
        path.append(parents[path[-1]])
    path.reverse()
    return path


def _nearest_to_goal(grid: OccupancyGrid, cells: Iterable[Cell], goal: Cell) -> Cell:
    return min(cells, key=lambda c: (distance(c, goal), grid.index(c)))


def _trivial(grid: OccupancyGrid, task: PlanningTask):
    """Result for tasks decided before any search, or None."""
    if not (is_free(grid, task.start) and is_free(grid, task.goal)):
        logger.debug("Start or goal occupied on %r", grid.name)
        return PlanResult(STATUS.NO_PATH, [task.start])
    if task.start == task.goal:
        return PlanResult(STATUS.SUCCESS, [task.start])
    return None


def _cost(g: Tuple[int, int]) -> float:
    return g[0] + g[1] * SQRT2


def _best_first(
    grid: OccupancyGrid, task: PlanningTask, deadline: Deadline, heuristic: Heuristic
) -> PlanResult:
    trivial = _trivial(grid, task)
    if trivial:
        return trivial

    start, goal = task.start, task.goal
    g: Dict[Cell, Tuple[int, int]] = {start: (0, 0)}
    parents: Dict[Cell, Cell] = {start: start}
    closed: Set[Cell] = set()
    heap = [(heuristic(start, goal), grid.index(start), start)]
    pops = 0

    status = STATUS.NO_PATH
    while heap:
        if deadline.expired():
            status = STATUS.TIMEOUT
            break
        _, _, cell = heapq.heappop(heap)
        pops += 1
        if cell in closed:
            continue
        closed.add(cell)
        if cell == goal:
            status = STATUS.SUCCESS
            break
        orth, diag = g[cell]
        for n, step in neighbors(grid, cell):
            if n in closed:
                continue
            cand = (orth + 1, diag) if step == 1.0 else (orth, diag + 1)
            cand_cost = _cost(cand)
            if n not in g or cand_cost < _cost(g[n]):
                g[n] = cand
                parents[n] = cell
                f = cand_cost + heuristic(n, goal)
                heapq.heappush(heap, (f, grid.index(n), n))

    if status == STATUS.SUCCESS:
        path = _trace(parents, goal)
    else:
        path = _trace(parents, _nearest_to_goal(grid, closed or [start], goal))
    logger.debug(
        "Search on %r finished: %s after %d expansions", grid.name, status, len(closed)
    )
    return PlanResult(status, path, iterations=pops, expansions=len(closed))


def plan_dijkstra(
    grid: OccupancyGrid, task: PlanningTask, cfg: PlannerConfig, deadline: Deadline
) -> PlanResult:
    """Uniform-cost search; ties pop the smaller row-major index first."""
    return _best_first(grid, task, deadline, _zero)


def plan_astar(
    grid: OccupancyGrid, task: PlanningTask, cfg: PlannerConfig, deadline: Deadline
) -> PlanResult:
    """A* with the octile heuristic, which is consistent under unit/diagonal costs."""
    return _best_first(grid, task, deadline, octile)


def plan_thetastar(
    grid: OccupancyGrid, task: PlanningTask, cfg: PlannerConfig, deadline: Deadline
) -> PlanResult:
    """Lazy Theta* with Euclidean edge costs and heuristic.

    Every consecutive pair of waypoints in the result has line of sight.
    """
    trivial = _trivial(grid, task)
    if trivial:
        return trivial

    start, goal = task.start, task.goal
    g: Dict[Cell, float] = {start: 0.0}
    parents: Dict[Cell, Cell] = {start: start}
    closed: Set[Cell] = set()
    heap = [(distance(start, goal), grid.index(start), start)]
    pops = 0

    status = STATUS.NO_PATH
    while heap:
        if deadline.expired():
            status = STATUS.TIMEOUT
            break
        _, _, cell = heapq.heappop(heap)
        pops += 1
        if cell in closed:
            continue

        parent = parents[cell]
        if parent != cell and not line_of_sight(grid, parent, cell):
            # The assumed shortcut is blocked; fall back to the best closed neighbor
            best = None
            for n, step in neighbors(grid, cell):
                if n in closed:
                    key = (g[n] + step, grid.index(n))
                    if best is None or key < best[0]:
                        best = (key, n)
            assert best is not None  # The generating cell is always closed
            g[cell] = best[0][0]
            parents[cell] = best[1]

        closed.add(cell)
        if cell == goal:
            status = STATUS.SUCCESS
            break

        parent = parents[cell]
        for n, _ in neighbors(grid, cell):
            if n in closed:
                continue
            cand = g[parent] + distance(parent, n)
            if cand < g.get(n, math.inf):
                g[n] = cand
                parents[n] = parent
                heapq.heappush(heap, (cand + distance(n, goal), grid.index(n), n))

    if status == STATUS.SUCCESS:
        path = _trace(parents, goal)
    else:
        path = _trace(parents, _nearest_to_goal(grid, closed or [start], goal))
    logger.debug(
        "Theta* on %r finished: %s after %d expansions", grid.name, status, len(closed)
    )
    return PlanResult(status, path, iterations=pops, expansions=len(closed))
