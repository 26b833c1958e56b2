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

"""Occupancy grid model and the geometry shared by every planner.

Cells are addressed as (row, col) with the origin in the top-left corner and
row-major storage, matching raster file order. A planar (x, y) position maps
to (col, row). Cells outside the grid are treated as occupied.
"""

from dataclasses import dataclass, field
from typing import Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import math


SQRT2 = math.sqrt(2.0)

FREE = 0
OCCUPIED = 1

# (d_row, d_col) in a fixed order; neighbor enumeration is deterministic.
_ORTHOGONAL = ((-1, 0), (0, -1), (0, 1), (1, 0))
_DIAGONAL = ((-1, -1), (-1, 1), (1, -1), (1, 1))


class PlanKitError(Exception):
    """Base class for errors raised by plankit"""


class InvalidDataError(PlanKitError, ValueError):
    """Input data violates a documented invariant"""


class FormatError(InvalidDataError):
    """A file could not be parsed"""

    def __init__(self, message: str, path=None, line: Optional[int] = None):
        location = ""
        if path is not None:
            location = f"{path}"
            if line is not None:
                location += f":{line}"
            location += ": "
        super().__init__(location + message)
        self.path = path
        self.line = line


class NoFreeSpaceError(InvalidDataError):
    """The grid has no free cell"""

    def __init__(self, name: str = ""):
        super().__init__(f"No free space in grid {name!r}" if name else "No free space")


class Cell(NamedTuple):
    """Grid cell index, row first."""

    row: int
    col: int

    @classmethod
    def parse(cls, value: str) -> "Cell":
        """Parse 'row,col'."""
        try:
            row, col = (int(v) for v in value.split(","))
        except ValueError:
            raise InvalidDataError(f"Invalid cell {value!r}, expected ROW,COL")
        return cls(row, col)

    def __str__(self):
        return f"{self.row},{self.col}"


Path = List[Cell]


@dataclass(frozen=True, eq=False)
class OccupancyGrid:
    """Binary traversability map.

    cells is a (height, width) uint8 array where 0 is free and 1 occupied. The
    array is made read-only on construction, so a grid can be shared freely
    between concurrent trials.
    """

    cells: np.ndarray
    resolution_m: float = 1.0
    name: str = ""
    _flat: bytes = field(init=False, repr=False)

    def __post_init__(self):
        cells = np.asarray(self.cells)
        if cells.ndim != 2 or cells.shape[0] < 1 or cells.shape[1] < 1:
            raise InvalidDataError(f"Grid must be 2D and non-empty, got {cells.shape}")
        if not np.isin(cells, (FREE, OCCUPIED)).all():
            raise InvalidDataError("Grid cells must be 0 (free) or 1 (occupied)")
        if not self.resolution_m > 0:
            raise InvalidDataError(f"Invalid resolution: {self.resolution_m}")
        cells = cells.astype(np.uint8)  # Always a private copy
        cells.flags.writeable = False
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "_flat", cells.tobytes())

    @classmethod
    def from_rows(
        cls, rows: Sequence[Sequence[int]], resolution_m: float = 1.0, name: str = ""
    ) -> "OccupancyGrid":
        return cls(np.array(rows, dtype=np.uint8), resolution_m, name)

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.cells.shape  # type: ignore

    def in_bounds(self, cell: Cell) -> bool:
        return 0 <= cell[0] < self.height and 0 <= cell[1] < self.width

    def index(self, cell: Cell) -> int:
        """Row-major index, used for deterministic tie-breaking."""
        return cell[0] * self.width + cell[1]

    def free_cells(self) -> Iterator[Cell]:
        for r, c in zip(*np.nonzero(self.cells == FREE)):
            yield Cell(int(r), int(c))

    def with_name(self, name: str) -> "OccupancyGrid":
        return OccupancyGrid(self.cells, self.resolution_m, name)

    def __eq__(self, other):
        return (
            isinstance(other, OccupancyGrid)
            and self.name == other.name
            and self.resolution_m == other.resolution_m
            and np.array_equal(self.cells, other.cells)
        )

    def __hash__(self):
        return hash((self.name, self.resolution_m, self.cells.tobytes()))

    def __repr__(self):
        return (
            f"OccupancyGrid(name={self.name!r}, width={self.width}, "
            f"height={self.height}, resolution_m={self.resolution_m})"
        )


def is_free(grid: OccupancyGrid, cell: Cell) -> bool:
    """True if the cell is inside the grid and not occupied."""
    r, c = cell
    w = grid.width
    if 0 <= r < grid.height and 0 <= c < w:
        return grid._flat[r * w + c] == FREE
    return False


def neighbors(grid: OccupancyGrid, cell: Cell) -> List[Tuple[Cell, float]]:
    """Free 8-connected neighbors with their move cost.

    A diagonal move is only allowed when both orthogonal cells it passes
    between are free.
    """
    if not is_free(grid, cell):
        return []
    r, c = cell
    result = []
    for dr, dc in _ORTHOGONAL:
        n = Cell(r + dr, c + dc)
        if is_free(grid, n):
            result.append((n, 1.0))
    for dr, dc in _DIAGONAL:
        n = Cell(r + dr, c + dc)
        if (
            is_free(grid, n)
            and is_free(grid, Cell(r + dr, c))
            and is_free(grid, Cell(r, c + dc))
        ):
            result.append((n, SQRT2))
    return result


def supercover(a: Cell, b: Cell) -> Iterator[Cell]:
    """Every cell touched by the segment between the centers of a and b.

    When the segment passes exactly through a grid corner, all cells sharing
    that corner are produced.
    """
    r, c = a
    d_row, d_col = b[0] - a[0], b[1] - a[1]
    step_r = 1 if d_row > 0 else -1
    step_c = 1 if d_col > 0 else -1
    ny, nx = abs(d_row), abs(d_col)
    yield Cell(r, c)
    iy = ix = 0
    while ix < nx or iy < ny:
        # Compare (0.5 + ix) / nx against (0.5 + iy) / ny without division
        decision = (1 + 2 * ix) * ny - (1 + 2 * iy) * nx
        if decision == 0:
            yield Cell(r, c + step_c)
            yield Cell(r + step_r, c)
            r += step_r
            c += step_c
            ix += 1
            iy += 1
        elif decision < 0:
            c += step_c
            ix += 1
        else:
            r += step_r
            iy += 1
        yield Cell(r, c)


def line_of_sight(grid: OccupancyGrid, a: Cell, b: Cell) -> bool:
    """True if every cell the segment a-b touches is free."""
    return all(is_free(grid, cell) for cell in supercover(a, b))


def distance(a: Cell, b: Cell) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def path_length(path: Sequence[Cell]) -> float:
    """Euclidean arc length of a piecewise-linear path, in cell units."""
    if not path:
        raise InvalidDataError("Path is empty")
    return math.fsum(distance(p, q) for p, q in zip(path, path[1:]))


def is_feasible(grid: OccupancyGrid, path: Sequence[Cell], start: Cell, goal: Cell):
    """True if path runs from start to goal through free space only."""
    if not path or tuple(path[0]) != tuple(start) or tuple(path[-1]) != tuple(goal):
        return False
    if not all(is_free(grid, p) for p in path):
        return False
    return all(line_of_sight(grid, p, q) for p, q in zip(path, path[1:]))
