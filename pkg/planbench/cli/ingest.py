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

from plankit.core.io import GRID_FORMAT, write_grid
from plankit.terrain import (
    IngestConfig,
    NODATA_POLICY,
    PRESETS,
    RASTER_READERS,
    read_raster,
    threshold_to_grid,
)

from .util import EnumChoice
from dataclasses import replace
from pathlib import Path
from typing import Optional
import click
import logging


logger = logging.getLogger(__name__)


def _ingest_config(
    ctx,
    preset: Optional[str],
    slope_deg: Optional[float],
    downsample: Optional[int],
    roughness_m: Optional[float],
    roughness_window: Optional[int],
    nodata_policy: Optional[NODATA_POLICY],
) -> IngestConfig:
    """A preset, if given, with the explicitly set fields overridden."""
    if preset is None and slope_deg is None:
        ctx.fail("Either --slope-deg or --preset is required.")
    overrides = {
        k: v
        for k, v in (
            ("slope_threshold_deg", slope_deg),
            ("downsample_factor", downsample),
            ("roughness_threshold_m", roughness_m),
            ("roughness_window", roughness_window),
            ("nodata_policy", nodata_policy),
        )
        if v is not None
    }
    if preset is not None:
        return replace(PRESETS[preset], **overrides)
    return IngestConfig(**overrides)


def _convert(
    source: Path, dest: Path, cfg: IngestConfig, fmt: Optional[GRID_FORMAT]
) -> None:
    raster = read_raster(source)
    grid = threshold_to_grid(raster, cfg)
    write_grid(grid, dest, fmt)
    occupied = int(grid.cells.sum())
    click.echo(
        f"{source.name}: {grid.width}x{grid.height} cells at {grid.resolution_m:g} m, "
        f"{occupied} occupied -> {dest}"
    )


@click.command()
@click.pass_context
@click.option(
    "-i",
    "--input",
    "input_path",
    required=True,
    type=click.Path(exists=True, path_type=Path),
    help="Elevation raster (.asc, .csv or .tif), or a directory of them.",
)
@click.option(
    "-o",
    "--out",
    required=True,
    type=click.Path(path_type=Path),
    help="Occupancy grid file, or a directory when --input is a directory.",
)
@click.option(
    "--preset",
    type=click.Choice(sorted(PRESETS), case_sensitive=False),
    help="Start from a published dataset recipe.",
)
@click.option(
    "--slope-deg",
    type=click.FloatRange(0, 90, min_open=True, max_open=True),
    help="Cells at or above this slope are occupied.",
)
@click.option(
    "--downsample",
    type=click.IntRange(min=1),
    help="Block-average the raster by this factor first.  [default: 1]",
)
@click.option(
    "--roughness-m",
    type=click.FloatRange(min=0, min_open=True),
    help="Cells at or above this detrended roughness are occupied too.",
)
@click.option(
    "--roughness-window",
    type=click.IntRange(min=3),
    help="Odd window size for roughness.  [default: 3]",
)
@click.option(
    "--nodata-policy",
    type=EnumChoice(NODATA_POLICY),
    help="Classification of no-data cells.  [default: occupied]",
)
@click.option(
    "-F",
    "--format",
    "fmt",
    type=EnumChoice(GRID_FORMAT),
    help="Grid file format [default: from the --out suffix, pgm for directories].",
)
def ingest(
    ctx,
    input_path,
    out,
    preset,
    slope_deg,
    downsample,
    roughness_m,
    roughness_window,
    nodata_policy,
    fmt,
):
    """
    Convert an elevation raster into an occupancy grid.

    \b
    Examples:
      $ planbench ingest --input dtm.asc --slope-deg 15 --downsample 4 --out dtm.pgm
      $ planbench ingest --input dtms/ --preset mars-20 --out mars-20/
    """
    cfg = _ingest_config(
        ctx, preset, slope_deg, downsample, roughness_m, roughness_window, nodata_policy
    )
    logger.debug("Ingest config: %s", cfg)

    if input_path.is_dir():
        sources = sorted(
            p for p in input_path.iterdir() if p.suffix.lower() in RASTER_READERS
        )
        if not sources:
            ctx.fail(f"No rasters found in {input_path}.")
        out.mkdir(parents=True, exist_ok=True)
        suffix = f".{(fmt or GRID_FORMAT.PGM).value}"
        for source in sources:
            _convert(source, out / (source.stem + suffix), cfg, fmt)
    else:
        if out.is_dir():
            ctx.fail("--out must be a file when --input is a file.")
        _convert(input_path, out, cfg, fmt)
