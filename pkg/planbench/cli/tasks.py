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

from plankit.core.io import GRID_SUFFIXES, read_grid
from plankit.tasks import DEFAULT_BUDGET_S, sample_task, save_tasks

from .util import click_seed_option
from pathlib import Path
import click
import logging


logger = logging.getLogger(__name__)


@click.command("sample-tasks")
@click.option(
    "-m",
    "--maps",
    required=True,
    type=click.Path(exists=True, file_okay=False, path_type=Path),
    help="Directory of occupancy grid files (.pgm, .csv).",
)
@click.option(
    "-o",
    "--out",
    required=True,
    type=click.Path(dir_okay=False, path_type=Path),
    help="Task CSV to write.",
)
@click.option(
    "--budget-s",
    type=click.FloatRange(min=0, min_open=True),
    default=DEFAULT_BUDGET_S,
    show_default=True,
    metavar="SECONDS",
    help="Planning time budget stored with each task.",
)
@click_seed_option
@click.pass_context
def sample_tasks(ctx, maps, out, budget_s, seed):
    """
    Pick one far-apart start/goal pair on every map.

    Both ends lie in the largest free region of the map, so every task is
    solvable.
    """
    files = sorted(p for p in maps.iterdir() if p.suffix.lower() in GRID_SUFFIXES)
    if not files:
        ctx.fail(f"No grid files found in {maps}.")

    tasks = []
    for path in files:
        grid = read_grid(path)
        task = sample_task(grid, seed, budget_s)
        tasks.append(task)
        click.echo(f"{grid.name}: {task.start} -> {task.goal}")

    names = [t.grid_name for t in tasks]
    duplicates = sorted({n for n in names if names.count(n) > 1})
    if duplicates:
        ctx.fail(f"Grid names must be unique, repeated: {', '.join(duplicates)}")
    save_tasks(out, tasks)
    logger.info("Wrote %d tasks to %s", len(tasks), out)
