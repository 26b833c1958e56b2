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

"""Occupancy grid files.

Two formats are supported: PGM (P2 ASCII or P5 binary, 0 = occupied and
255 = free) and CSV of 0/1 integers, one line per grid row. Name and
resolution travel in a JSON sidecar next to the grid file.
"""

from . import OccupancyGrid, FormatError, InvalidDataError, FREE, OCCUPIED

from enum import Enum, unique
from pathlib import Path
from typing import Optional, Union
import numpy as np
import json
import re
import logging

logger = logging.getLogger(__name__)


PathLike = Union[str, Path]

PGM_FREE = 255
PGM_OCCUPIED = 0

_PGM_HEADER = re.compile(
    rb"^(P[25])\s(?:\s*#.*[\r\n])*"
    rb"\s*(\d+)\s(?:\s*#.*[\r\n])*"
    rb"\s*(\d+)\s(?:\s*#.*[\r\n])*"
    rb"\s*(\d+)\s"
)


@unique
class GRID_FORMAT(str, Enum):
    """Supported occupancy grid file formats."""

    PGM = "pgm"
    CSV = "csv"

    @classmethod
    def for_path(cls, path: PathLike) -> "GRID_FORMAT":
        suffix = Path(path).suffix.lower().lstrip(".")
        try:
            return cls(suffix)
        except ValueError:
            raise FormatError(f"Unknown grid format {suffix!r}", path)


GRID_SUFFIXES = tuple(f".{f.value}" for f in GRID_FORMAT)


def sidecar_path(path: PathLike) -> Path:
    return Path(path).with_suffix(".json")


def _parse_pgm(data: bytes, path) -> np.ndarray:
    m = _PGM_HEADER.match(data)
    if not m:
        raise FormatError("Not a PGM file", path)
    magic, width, height, maxval = m.groups()
    width, height, maxval = int(width), int(height), int(maxval)
    if not 0 < maxval < 65536:
        raise FormatError(f"Invalid PGM maxval {maxval}", path)
    count = width * height
    body = data[m.end() :]
    if magic == b"P5":
        dtype = np.dtype("u1") if maxval < 256 else np.dtype(">u2")
        if len(body) < count * dtype.itemsize:
            raise FormatError("Truncated PGM pixel data", path)
        pixels = np.frombuffer(body, dtype=dtype, count=count)
    else:
        # Strip comments, then read whitespace separated integers
        text = re.sub(rb"#[^\r\n]*", b"", body)
        tokens = text.split()
        if len(tokens) != count:
            raise FormatError(f"Expected {count} PGM values, got {len(tokens)}", path)
        try:
            pixels = np.array([int(t) for t in tokens], dtype=np.int64)
        except ValueError as e:
            raise FormatError(f"Invalid PGM value: {e}", path)
    # Anything darker than mid-gray is an obstacle
    scaled = pixels.astype(np.float64) * (255.0 / maxval)
    return np.where(scaled < 128, OCCUPIED, FREE).reshape(height, width)


def _parse_csv(text: str, path) -> np.ndarray:
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            row = [int(v) for v in line.split(",")]
        except ValueError:
            raise FormatError(f"Invalid grid row {line!r}", path, lineno)
        if rows and len(row) != len(rows[0]):
            raise FormatError(
                f"Expected {len(rows[0])} columns, got {len(row)}", path, lineno
            )
        if any(v not in (FREE, OCCUPIED) for v in row):
            raise FormatError("Grid values must be 0 or 1", path, lineno)
        rows.append(row)
    if not rows:
        raise FormatError("Empty grid file", path)
    return np.array(rows, dtype=np.uint8)


def read_grid(path: PathLike, fmt: Optional[GRID_FORMAT] = None) -> OccupancyGrid:
    """Read a grid file, with its sidecar if present.

    The grid name defaults to the file stem.
    """
    path = Path(path)
    fmt = fmt or GRID_FORMAT.for_path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise FormatError(f"Unable to read grid: {e.strerror}", path)
    if fmt == GRID_FORMAT.PGM:
        cells = _parse_pgm(data, path)
    else:
        cells = _parse_csv(data.decode("ascii", "replace"), path)

    name = path.stem
    resolution_m = 1.0
    meta_path = sidecar_path(path)
    if meta_path.is_file():
        try:
            meta = json.loads(meta_path.read_text())
        except ValueError as e:
            raise FormatError(f"Invalid sidecar JSON: {e}", meta_path)
        name = meta.get("name", name)
        resolution_m = float(meta.get("resolution_m", resolution_m))
    logger.debug("Read %s grid %r (%dx%d)", fmt.value, name, *cells.shape[::-1])
    try:
        return OccupancyGrid(cells, resolution_m, name)
    except InvalidDataError as e:
        raise FormatError(str(e), path)


def format_grid(grid: OccupancyGrid, fmt: GRID_FORMAT) -> bytes:
    if fmt == GRID_FORMAT.PGM:
        pixels = np.where(grid.cells == FREE, PGM_FREE, PGM_OCCUPIED)
        lines = [f"P2\n{grid.width} {grid.height}\n{PGM_FREE}"]
        lines.extend(" ".join(str(v) for v in row) for row in pixels)
    else:
        lines = [",".join(str(v) for v in row) for row in grid.cells]
    return ("\n".join(lines) + "\n").encode("ascii")


def write_grid(
    grid: OccupancyGrid,
    path: PathLike,
    fmt: Optional[GRID_FORMAT] = None,
    sidecar: bool = True,
) -> None:
    """Write a grid file and (by default) its JSON sidecar."""
    path = Path(path)
    fmt = fmt or GRID_FORMAT.for_path(path)
    try:
        path.write_bytes(format_grid(grid, fmt))
        if sidecar:
            meta = {"name": grid.name, "resolution_m": grid.resolution_m}
            sidecar_path(path).write_text(json.dumps(meta, indent=2) + "\n")
    except OSError as e:
        raise OSError(e.errno, f"Unable to write grid {path}: {e.strerror}")
    logger.debug("Wrote %s grid %r to %s", fmt.value, grid.name, path)
