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

from plankit.planning import PLANNER, PlannerConfig
from plankit.tasks import load_tasks
from plankit.metrics import status_counts

from ..bench import (
    WATCHDOG_SLACK_S,
    load_manifest,
    load_maps,
    manifest_tasks,
    run_benchmark,
    write_outputs,
)
from .util import (
    click_parse_planners,
    click_seed_option,
    click_sampling_options,
    sampling_kwargs,
)
from dataclasses import replace
from pathlib import Path
import click
import logging


logger = logging.getLogger(__name__)


ALL_PLANNERS = ",".join(p.value for p in PLANNER)


@click.command()
@click.option(
    "-m",
    "--manifest",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Dataset manifest (JSON).",
)
@click.option(
    "-t",
    "--tasks",
    "tasks_file",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Task CSV [default: the task files named in the manifest].",
)
@click.option(
    "-p",
    "--planners",
    default=ALL_PLANNERS,
    show_default=True,
    callback=click_parse_planners,
    help="Comma separated planners to run, in report order.",
)
@click.option(
    "--budget-s",
    type=click.FloatRange(min=0, min_open=True),
    metavar="SECONDS",
    help="Override the planning budget of every task.",
)
@click_seed_option
@click_sampling_options
@click.option(
    "-o",
    "--out-dir",
    required=True,
    envvar="PLANBENCH_OUT_DIR",
    show_envvar=True,
    type=click.Path(file_okay=False, path_type=Path),
    help="Directory for records, reports and overlays.",
)
@click.option(
    "-j",
    "--workers",
    type=click.IntRange(min=1),
    default=1,
    show_default=True,
    help="Maps planned in parallel; timings are only comparable at equal values.",
)
@click.option(
    "--watchdog-slack-s",
    type=click.FloatRange(min=0),
    default=WATCHDOG_SLACK_S,
    show_default=True,
    metavar="SECONDS",
    help="Time past the budget after which a trial is abandoned.",
)
@click.option(
    "--no-memory",
    is_flag=True,
    help="Skip allocation tracing, which slows down planning.",
)
@click.option("--no-overlays", is_flag=True, help="Don't write SVG overlays.")
@click.pass_context
def bench(
    ctx,
    manifest,
    tasks_file,
    planners,
    budget_s,
    seed,
    out_dir,
    workers,
    watchdog_slack_s,
    no_memory,
    no_overlays,
    **kw,
):
    """
    Run planners over every map of a dataset.

    Writes records.jsonl, aggregates.csv, report.md, report.json and
    overlays/<map>_<planner>.svg into the output directory.
    """
    options = sampling_kwargs(kw)
    configs = [PlannerConfig(p, seed=seed, **options) for p in planners]

    dataset = load_manifest(manifest)
    tasks = load_tasks(tasks_file) if tasks_file else manifest_tasks(dataset)
    if not tasks:
        ctx.fail("No tasks given; use --tasks or reference task files in the manifest.")
    if budget_s is not None:
        tasks = [replace(t, budget_s=budget_s) for t in tasks]

    maps = load_maps(dataset)
    report = run_benchmark(
        dataset,
        configs,
        tasks,
        maps=maps,
        workers=workers,
        watchdog_slack_s=watchdog_slack_s,
        track_memory=not no_memory,
    )
    write_outputs(report, out_dir, None if no_overlays else maps)

    counts = status_counts(report.records)
    summary = ", ".join(f"{n} {s.value}" for s, n in counts.items() if n)
    click.echo(f"{len(report.records)} trials on {len(maps)} maps: {summary}")
    for row in report.aggregates:
        click.echo(
            f"  {row.planner_kind.value:<12} SR {row.success_rate_pct:5.1f}%  "
            f"length {row.mean_path_length:9.2f}  "
            f"time {row.mean_planning_time_s:8.3f} s"
        )
    click.echo(f"Results written to {out_dir}")
