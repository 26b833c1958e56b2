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

from plankit.core import is_feasible
from plankit.core.io import read_grid
from plankit.planning import PLANNER, PlannerConfig, plan as run_planner
from plankit.tasks import DEFAULT_BUDGET_S, PlanningTask

from ..overlay import render_overlay
from .util import (
    CELL,
    EnumChoice,
    click_seed_option,
    click_sampling_options,
    sampling_kwargs,
)
from pathlib import Path
import click
import json
import logging


logger = logging.getLogger(__name__)


@click.command()
@click.option(
    "-m",
    "--map",
    "map_file",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Occupancy grid file.",
)
@click.option(
    "-p",
    "--planner",
    required=True,
    type=EnumChoice(PLANNER),
    help="Planner to run.",
)
@click.option("--start", required=True, type=CELL, help="Start cell.")
@click.option("--goal", required=True, type=CELL, help="Goal cell.")
@click.option(
    "--budget-s",
    type=click.FloatRange(min=0, min_open=True),
    default=DEFAULT_BUDGET_S,
    show_default=True,
    metavar="SECONDS",
    help="Planning time budget.",
)
@click_seed_option
@click_sampling_options
@click.option(
    "-o",
    "--out",
    type=click.Path(dir_okay=False, path_type=Path),
    help="Write the result as JSON to this file instead of standard output.",
)
@click.option(
    "--overlay",
    type=click.Path(dir_okay=False, path_type=Path),
    help="Write an SVG of the map with the path.",
)
@click.option(
    "--no-memory",
    is_flag=True,
    help="Skip allocation tracing, which slows down planning.",
)
@click.pass_context
def plan(
    ctx, map_file, planner, start, goal, budget_s, seed, out, overlay, no_memory, **kw
):
    """
    Run one planner on one map.

    \b
    Example:
      $ planbench plan --map crater.pgm --planner astar --start 3,4 --goal 40,52
    """
    cfg = PlannerConfig(planner, seed=seed, **sampling_kwargs(kw))
    grid = read_grid(map_file)
    for name, cell in (("--start", start), ("--goal", goal)):
        if not grid.in_bounds(cell):
            ctx.fail(f"{name} {cell} is outside the {grid.width}x{grid.height} map.")
    task = PlanningTask(grid.name, start, goal, budget_s, seed)

    result = run_planner(grid, task, cfg, track_memory=not no_memory)
    data = result.to_dict()
    data["feasible"] = is_feasible(grid, result.path, start, goal)
    data["config"] = cfg.to_dict()
    data["task"] = {
        "grid_name": task.grid_name,
        "start": list(start),
        "goal": list(goal),
        "budget_s": budget_s,
    }
    text = json.dumps(data, indent=2) + "\n"
    if out:
        out.write_text(text)
        click.echo(
            f"{planner.value}: {result.status.value} with {len(result.path)} "
            f"waypoints in {result.planning_time_s:.3f} s",
            err=True,
        )
    else:
        click.echo(text, nl=False)

    if overlay:
        render_overlay(grid, [(planner.value, result.path)], overlay, start, goal)
