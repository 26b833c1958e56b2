from plankit.core import Cell, OccupancyGrid

from typing import Dict
import logging
import math
import os

import numpy as np


logger = logging.getLogger(__name__)

PKG_DIR = os.path.dirname(os.path.abspath(__file__))


def file_path(*relative_path):
    return os.path.join(PKG_DIR, "files", *relative_path)


def open_file(*relative_path):
    return open(file_path(*relative_path), "rb")


def random_grid(height, width, density, seed, name="random"):
    """Seeded grid with roughly density of its cells occupied."""
    rng = np.random.default_rng(seed)
    cells = (rng.random((height, width)) < density).astype(np.uint8)
    return OccupancyGrid(cells, 1.0, name)


def bellman_ford(grid: OccupancyGrid, source: Cell) -> Dict[Cell, float]:
    """Shortest 8-connected costs from source, by plain edge relaxation.

    Moves are enumerated here from the raw cell array so the result does not
    depend on the library's own neighbor rules.
    """
    free = np.asarray(grid.cells) == 0
    height, width = free.shape

    def open_(r, c):
        return 0 <= r < height and 0 <= c < width and bool(free[r, c])

    def moves(r, c):
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                if (dr, dc) == (0, 0) or not open_(r + dr, c + dc):
                    continue
                if dr and dc:
                    if not (open_(r + dr, c) and open_(r, c + dc)):
                        continue
                    yield (r + dr, c + dc), math.sqrt(2)
                else:
                    yield (r + dr, c + dc), 1.0

    if not open_(*source):
        return {}
    dist = {tuple(source): 0.0}
    changed = True
    while changed:
        changed = False
        for cell in list(dist):
            for n, step in moves(*cell):
                cand = dist[cell] + step
                if cand < dist.get(n, math.inf) - 1e-12:
                    dist[n] = cand
                    changed = True
    return {Cell(*cell): d for cell, d in dist.items()}


def random_free_pair(grid: OccupancyGrid, seed: int):
    """Two seeded free cells, not necessarily connected to each other."""
    rng = np.random.default_rng(seed)
    free = np.argwhere(np.asarray(grid.cells) == 0)
    a, b = rng.choice(len(free), size=2, replace=len(free) < 2)
    return Cell(*map(int, free[a])), Cell(*map(int, free[b]))
