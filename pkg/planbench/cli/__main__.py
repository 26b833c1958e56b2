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

from plankit.core import PlanKitError

import planbench.logging_setup

from .. import __version__
from ..diagnostics import get_diagnostics
from ..settings import RunConfig, SUBCOMMANDS
from .util import planbench_group, EXIT_FAILURE
from .ingest import ingest
from .tasks import sample_tasks
from .plan import plan
from .bench import bench
from .report import report
from typing import List, Optional
import click
import sys
import logging


logger = logging.getLogger(__name__)


CLICK_CONTEXT_SETTINGS = dict(help_option_names=["-h", "--help"], max_content_width=999)

# Exit status for rejected command lines
EXIT_USAGE = 1


def print_version(ctx, param, value):
    if not value or ctx.resilient_parsing:
        return
    click.echo(f"Planetary path planning benchmark (planbench) version: {__version__}")
    ctx.exit()


def print_diagnostics(ctx, param, value):
    if not value or ctx.resilient_parsing:
        return
    click.echo(get_diagnostics())
    ctx.exit()


@planbench_group(context_settings=CLICK_CONTEXT_SETTINGS)
@click.option(
    "-c",
    "--config",
    type=click.Path(exists=True, dir_okay=False),
    metavar="FILE",
    help="Read option defaults from a TOML or JSON FILE.",
)
@click.option(
    "--seed",
    type=click.IntRange(min=0),
    default=None,
    help="Seed for every subcommand, unless the subcommand is given its own.",
)
@click.option(
    "-l",
    "--log-level",
    default=None,
    type=click.Choice(planbench.logging_setup.LOG_LEVEL_NAMES, case_sensitive=False),
    help="Enable logging at given verbosity level.",
)
@click.option(
    "--log-file",
    default=None,
    type=str,
    metavar="FILE",
    help="Write logs to the given FILE instead of standard error; "
    "ignored unless --log-level is also set.",
)
@click.option(
    "--diagnose",
    is_flag=True,
    callback=print_diagnostics,
    expose_value=False,
    is_eager=True,
    help="Show the environment fingerprint recorded in benchmark reports.",
)
@click.option(
    "-v",
    "--version",
    is_flag=True,
    callback=print_version,
    expose_value=False,
    is_eager=True,
    help="Show version information about the app",
)
@click.pass_context
def cli(ctx, config, seed, log_level, log_file):
    """
    Benchmark global path planners on planetary terrain maps.

    Examples:

    \b
      Turn a DTM into an occupancy grid with the Moon 15 degree recipe:
      $ planbench ingest --input dtm.asc --preset moon-15 --out maps/dtm.pgm

    \b
      Pick a start and goal on every map:
      $ planbench sample-tasks --maps maps --seed 1 --out tasks.csv

    \b
      Benchmark all planners:
      $ planbench bench --manifest dataset.json --tasks tasks.csv --out-dir out
    """
    if log_level:
        planbench.logging_setup.setup(log_level, log_file=log_file)

    settings = RunConfig(config)
    default_map = settings.default_map()
    if seed is not None:
        for name in SUBCOMMANDS:
            default_map[name]["seed"] = seed
    ctx.default_map = default_map
    ctx.obj = settings


COMMANDS = (ingest, sample_tasks, plan, bench, report)


for cmd in COMMANDS:
    cli.add_command(cmd)


def dispatch(argv: Optional[List[str]] = None) -> int:
    """Run the command line, returning the process exit status.

    0 on success, 1 when the command line is rejected and 2 when the command
    fails while running.
    """
    try:
        rv = cli.main(args=argv, prog_name="planbench", standalone_mode=False)
    except click.UsageError as e:
        e.show()
        return EXIT_USAGE
    except click.Abort:
        click.echo("Aborted!", err=True)
        return EXIT_USAGE
    except click.ClickException as e:
        logger.error("Error", exc_info=e)
        e.show()
        return EXIT_FAILURE
    except (PlanKitError, ValueError, OSError) as e:
        logger.error("Error", exc_info=e)
        click.echo(f"Error: {e}", err=True)
        return EXIT_FAILURE
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 1
    except Exception as e:
        logger.error("Unexpected error", exc_info=e)
        click.echo(f"Error: {type(e).__name__}: {e}", err=True)
        return EXIT_FAILURE
    return rv if isinstance(rv, int) else 0


def main():
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
