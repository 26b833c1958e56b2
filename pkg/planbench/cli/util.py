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

from plankit.core import Cell
from plankit.planning import PLANNER

from typing import List
import functools
import click


# Exit status for failures after the arguments were accepted
EXIT_FAILURE = 2


class EnumChoice(click.Choice):
    """
    Use an enum's values as the definition for a choice option.

    Options are not case sensitive, and dashes may be used in place of
    underscores.
    """

    def __init__(self, choices_enum, hidden=[]):
        super().__init__(
            [v.value for v in choices_enum if v not in hidden],
            case_sensitive=False,
        )
        self.choices_enum = choices_enum

    def convert(self, value, param, ctx):
        if isinstance(value, self.choices_enum):
            return value
        value = str(value).replace("-", "_")
        return self.choices_enum(super().convert(value, param, ctx))


class CellParamType(click.ParamType):
    """A grid cell given as ROW,COL."""

    name = "ROW,COL"

    def convert(self, value, param, ctx):
        if isinstance(value, Cell):
            return value
        if isinstance(value, (list, tuple)) and len(value) == 2:
            return Cell(int(value[0]), int(value[1]))
        try:
            return Cell.parse(str(value))
        except ValueError as e:
            self.fail(str(e), param, ctx)


CELL = CellParamType()


class _PlanbenchGroup(click.Group):
    """click.Group listing subcommands in pipeline order rather than by name."""

    def list_commands(self, ctx):
        return list(self.commands)


def planbench_group(*args, **kwargs):
    return click.group(cls=_PlanbenchGroup, *args, **kwargs)  # type: ignore


def click_callback(invoke_on_missing=False):
    def wrap(f):
        @functools.wraps(f)
        def inner(ctx, param, val):
            if not invoke_on_missing and not param.required and val is None:
                return None
            try:
                return f(ctx, param, val)
            except ValueError as e:
                ctx.fail(f'Invalid value for "{param.name}": {str(e)}')

        return inner

    return wrap


@click_callback()
def click_parse_planners(ctx, param, val) -> List[PLANNER]:
    """Comma separated planner names, or a list of them from a config file."""
    names = val.split(",") if isinstance(val, str) else list(val)
    planners = [PLANNER.parse(n) for n in names if str(n).strip()]
    if not planners:
        raise ValueError("no planners given")
    if len(set(planners)) != len(planners):
        raise ValueError("planners must not repeat")
    return planners


click_seed_option = click.option(
    "--seed",
    type=click.IntRange(min=0),
    default=0,
    show_default=True,
    help="Seed for random choices, recorded in every output.",
)


def click_sampling_options(f):
    """Options shared by every command that configures sampling planners."""
    options = [
        click.option(
            "--epsilon",
            type=click.FloatRange(min=0, min_open=True),
            default=5.0,
            show_default=True,
            help="Tree extension step, in cells.",
        ),
        click.option(
            "--goal-bias",
            type=click.FloatRange(0, 1),
            default=0.05,
            show_default=True,
            help="Probability of sampling the goal.",
        ),
        click.option(
            "--max-iters",
            type=click.IntRange(min=1),
            default=100000,
            show_default=True,
            help="Iteration limit for sampling planners.",
        ),
        click.option(
            "--goal-tolerance",
            type=click.FloatRange(min=0),
            default=None,
            help="Distance from the goal that counts as arrived [default: 0 for "
            "graph planners, epsilon for sampling planners].",
        ),
        click.option(
            "--waypoint-bias",
            type=click.FloatRange(0, 1),
            default=0.3,
            show_default=True,
            help="Probability that dynamic_rrt samples a cached waypoint.",
        ),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def sampling_kwargs(kwargs) -> dict:
    """Pop the sampling options into PlannerConfig keyword arguments."""
    return {
        "epsilon": kwargs.pop("epsilon"),
        "goal_bias": kwargs.pop("goal_bias"),
        "max_iterations": kwargs.pop("max_iters"),
        "goal_tolerance": kwargs.pop("goal_tolerance"),
        "waypoint_bias": kwargs.pop("waypoint_bias"),
    }
