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

"""Grid maps with planned paths drawn on top, saved as SVG.

Figures are built with matplotlib's object API, so rendering touches no
pyplot state. Saved files carry no date and use a fixed id salt, so the same
input always gives the same bytes.
"""

from plankit.core import Cell, OccupancyGrid, Path, OCCUPIED

from matplotlib.figure import Figure
from pathlib import Path as FilePath
from typing import Optional, Sequence, Tuple, Union
import matplotlib
import io
import logging

logger = logging.getLogger(__name__)


# Longest side of the figure, in inches.
DEFAULT_SIZE_IN = 8.0

START_COLOR = "#008000"
GOAL_COLOR = "#c8102e"
STROKES = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#17becf",
    "#8c564b",
    "#e377c2",
)

SVG_RC = {
    "svg.hashsalt": "planbench",
    "svg.fonttype": "none",
}

LabeledPath = Tuple[str, Path]


def draw_overlay(
    grid: OccupancyGrid,
    paths: Sequence[LabeledPath],
    start: Optional[Cell] = None,
    goal: Optional[Cell] = None,
    size_in: float = DEFAULT_SIZE_IN,
) -> Figure:
    """The grid as an image with one line per path, markers and a legend.

    Data coordinates are (col, row) with row 0 at the top, so a cell center
    sits on integer coordinates. Start and goal default to the ends of the
    first path.
    """
    longest = max(grid.width, grid.height)
    fig = Figure(
        figsize=(size_in * grid.width / longest, size_in * grid.height / longest),
        facecolor="white",
    )
    ax = fig.add_axes((0, 0, 1, 1))
    ax.set_axis_off()
    ax.imshow(
        (grid.cells == OCCUPIED).astype(float),
        cmap="gray_r",
        vmin=0,
        vmax=1,
        interpolation="none",
        origin="upper",
        gid="grid",
    )

    for i, (label, path) in enumerate(paths):
        (line,) = ax.plot(
            [c.col for c in path],
            [c.row for c in path],
            color=STROKES[i % len(STROKES)],
            linewidth=1.5,
            solid_capstyle="round",
            label=label,
        )
        line.set_gid(f"path-{label}")
    if paths and paths[0][1]:
        start = start if start is not None else paths[0][1][0]
        goal = goal if goal is not None else paths[0][1][-1]

    markers = (("start", start, START_COLOR), ("goal", goal, GOAL_COLOR))
    for name, cell, color in markers:
        if cell is not None:
            ax.scatter(
                [cell.col], [cell.row], c=color, marker="*", s=120, label=name, gid=name
            )

    ax.set_xlim(-0.5, grid.width - 0.5)
    ax.set_ylim(grid.height - 0.5, -0.5)
    if ax.get_legend_handles_labels()[1]:
        ax.legend(loc="upper left", fontsize="small")
    return fig


def format_overlay(
    grid: OccupancyGrid,
    paths: Sequence[LabeledPath],
    start: Optional[Cell] = None,
    goal: Optional[Cell] = None,
    size_in: float = DEFAULT_SIZE_IN,
) -> bytes:
    fig = draw_overlay(grid, paths, start, goal, size_in)
    buf = io.BytesIO()
    with matplotlib.rc_context(SVG_RC):
        fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue()


def render_overlay(
    grid: OccupancyGrid,
    paths: Sequence[LabeledPath],
    destination: Union[str, FilePath],
    start: Optional[Cell] = None,
    goal: Optional[Cell] = None,
    size_in: float = DEFAULT_SIZE_IN,
) -> None:
    path = FilePath(destination)
    try:
        path.write_bytes(format_overlay(grid, paths, start, goal, size_in))
    except OSError as e:
        raise OSError(e.errno, f"Unable to write overlay {path}: {e.strerror}")
    logger.debug("Wrote overlay with %d paths to %s", len(paths), path)
