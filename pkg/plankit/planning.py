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

"""Planner interface: configuration, results, deadlines and dispatch.

Every planner is a function (grid, task, cfg, deadline) -> PlanResult. The
dispatcher wraps the call with wall-clock timing and allocation tracing so
that all planners are measured the same way.
"""

from .core import Cell, OccupancyGrid, InvalidDataError, Path

from dataclasses import dataclass, field, asdict, replace
from enum import Enum, unique
from typing import Callable, Dict, Optional, TYPE_CHECKING
import threading
import tracemalloc
import time
import logging

if TYPE_CHECKING:
    from .tasks import PlanningTask

logger = logging.getLogger(__name__)


DEFAULT_EPSILON = 5.0
DEFAULT_MAX_ITERATIONS = 100_000
DEFAULT_GOAL_BIAS = 0.05
DEFAULT_WAYPOINT_BIAS = 0.3


@unique
class PLANNER(str, Enum):
    """Benchmarked planners."""

    DIJKSTRA = "dijkstra"
    ASTAR = "astar"
    THETASTAR = "thetastar"
    RRT = "rrt"
    RRT_CONNECT = "rrt_connect"
    DYNAMIC_RRT = "dynamic_rrt"

    @property
    def is_sampling(self) -> bool:
        return self in (PLANNER.RRT, PLANNER.RRT_CONNECT, PLANNER.DYNAMIC_RRT)

    @classmethod
    def parse(cls, name: str) -> "PLANNER":
        try:
            return cls(name.strip().lower().replace("-", "_"))
        except ValueError:
            raise InvalidDataError(f"Unknown planner {name!r}")

    def __str__(self):
        return self.value


@unique
class STATUS(str, Enum):
    """Outcome of a planner invocation."""

    SUCCESS = "success"
    TIMEOUT = "timeout"
    EXHAUSTED = "exhausted"
    NO_PATH = "no_path"
    ERROR = "error"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class PlannerConfig:
    planner_kind: PLANNER
    epsilon: float = DEFAULT_EPSILON
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    goal_tolerance: Optional[float] = None
    goal_bias: float = DEFAULT_GOAL_BIAS
    waypoint_bias: float = DEFAULT_WAYPOINT_BIAS
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "planner_kind", PLANNER(self.planner_kind))
        if not self.epsilon > 0:
            raise InvalidDataError(f"epsilon must be positive, got {self.epsilon}")
        if not 0 <= self.goal_bias <= 1:
            raise InvalidDataError(f"goal_bias must be in [0, 1], got {self.goal_bias}")
        if not 0 <= self.waypoint_bias <= 1:
            raise InvalidDataError(
                f"waypoint_bias must be in [0, 1], got {self.waypoint_bias}"
            )
        if self.max_iterations < 1:
            raise InvalidDataError(
                f"max_iterations must be at least 1, got {self.max_iterations}"
            )
        if self.goal_tolerance is not None and self.goal_tolerance < 0:
            raise InvalidDataError(
                f"goal_tolerance must be non-negative, got {self.goal_tolerance}"
            )
        if self.seed < 0:
            raise InvalidDataError(f"seed must be unsigned, got {self.seed}")

    @property
    def resolved_goal_tolerance(self) -> float:
        """0 for graph planners, epsilon for sampling planners, unless set."""
        if self.goal_tolerance is not None:
            return self.goal_tolerance
        return self.epsilon if self.planner_kind.is_sampling else 0.0

    def to_dict(self) -> Dict:
        data = asdict(self)
        data["planner_kind"] = self.planner_kind.value
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "PlannerConfig":
        return cls(**data)


@dataclass
class PlanResult:
    status: STATUS
    path: Path
    planning_time_s: float = 0.0
    peak_memory_kib: float = 0.0
    iterations: int = 0
    expansions: int = 0

    @property
    def success(self) -> bool:
        return self.status == STATUS.SUCCESS

    def to_dict(self) -> Dict:
        return {
            "status": self.status.value,
            "waypoints": [[c.row, c.col] for c in self.path],
            "planning_time_s": self.planning_time_s,
            "peak_memory_kib": self.peak_memory_kib,
            "iterations": self.iterations,
            "expansions": self.expansions,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "PlanResult":
        return cls(
            status=STATUS(data["status"]),
            path=[Cell(int(r), int(c)) for r, c in data["waypoints"]],
            planning_time_s=float(data["planning_time_s"]),
            peak_memory_kib=float(data["peak_memory_kib"]),
            iterations=int(data["iterations"]),
            expansions=int(data["expansions"]),
        )


@dataclass
class Deadline:
    """Cooperative time limit, polled by planners once per iteration.

    The cancel event lets a supervising thread stop a planner early without
    interrupting an expansion half way.
    """

    budget_s: float
    cancel: threading.Event = field(default_factory=threading.Event)
    started: float = field(default_factory=time.monotonic)

    @property
    def expires(self) -> float:
        return self.started + self.budget_s

    def expired(self) -> bool:
        return self.cancel.is_set() or time.monotonic() >= self.expires

    def remaining(self) -> float:
        return max(0.0, self.expires - time.monotonic())


PlannerFunction = Callable[
    [OccupancyGrid, "PlanningTask", PlannerConfig, Deadline], PlanResult
]


class _MemoryMeter:
    """Peak traced allocation during a block, in KiB, relative to its start."""

    def __init__(self, enabled: bool):
        self.enabled = enabled
        self.peak_kib = 0.0

    def __enter__(self):
        if self.enabled:
            self._owner = not tracemalloc.is_tracing()
            if self._owner:
                tracemalloc.start()
            else:
                tracemalloc.reset_peak()
            self._baseline = tracemalloc.get_traced_memory()[0]
        return self

    def __exit__(self, typ, value, traceback):
        if self.enabled and tracemalloc.is_tracing():
            peak = tracemalloc.get_traced_memory()[1]
            self.peak_kib = max(0, peak - self._baseline) / 1024.0
            if self._owner:
                tracemalloc.stop()


def _planners() -> Dict[PLANNER, PlannerFunction]:
    from . import search, rrt

    return {
        PLANNER.DIJKSTRA: search.plan_dijkstra,
        PLANNER.ASTAR: search.plan_astar,
        PLANNER.THETASTAR: search.plan_thetastar,
        PLANNER.RRT: rrt.plan_rrt,
        PLANNER.RRT_CONNECT: rrt.plan_rrt_connect,
        PLANNER.DYNAMIC_RRT: rrt.plan_dynamic_rrt,
    }


def get_planner(kind: PLANNER) -> PlannerFunction:
    return _planners()[PLANNER(kind)]


def plan(
    grid: OccupancyGrid,
    task: "PlanningTask",
    cfg: PlannerConfig,
    deadline: Optional[Deadline] = None,
    track_memory: bool = True,
) -> PlanResult:
    """Run the configured planner on a task, measuring time and memory.

    Only the planner call itself is timed.
    """
    if deadline is None:
        deadline = Deadline(task.budget_s)
    planner = get_planner(cfg.planner_kind)
    logger.debug(
        "Planning %s on %r: %s -> %s",
        cfg.planner_kind,
        grid.name,
        task.start,
        task.goal,
    )
    with _MemoryMeter(track_memory) as meter:
        t0 = time.perf_counter()
        result = planner(grid, task, cfg, deadline)
        elapsed = time.perf_counter() - t0
    return replace(result, planning_time_s=elapsed, peak_memory_kib=meter.peak_kib)
