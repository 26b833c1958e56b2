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

"""Elevation rasters to occupancy grids.

The pipeline is: block-mean downsampling of elevation, slope by central
differences (one-sided at borders and next to no-data), optional detrended
roughness, then thresholding. A cell is occupied when its slope is at or
above the threshold, when roughness is enabled and at or above its
threshold, or when it is no-data and the no-data policy says occupied.
"""

from .core import OccupancyGrid, FormatError, InvalidDataError, FREE, OCCUPIED

from dataclasses import dataclass
from enum import Enum, unique
from pathlib import Path
from typing import Dict, Optional, Union
from scipy.ndimage import correlate
import numpy as np
import json
import logging

try:
    import rasterio
except ImportError:  # Optional extra
    rasterio = None  # type: ignore

logger = logging.getLogger(__name__)


PathLike = Union[str, Path]

# Slack for the inclusive slope comparison, in degrees.
SLOPE_EPSILON_DEG = 1e-9

DEFAULT_ROUGHNESS_WINDOW = 3

_ASC_HEADER_KEYS = {
    "ncols",
    "nrows",
    "xllcorner",
    "yllcorner",
    "xllcenter",
    "yllcenter",
    "cellsize",
    "nodata_value",
}


def _check_window(window: int) -> None:
    if window < 3 or window % 2 != 1:
        raise InvalidDataError(f"Window must be an odd integer >= 3, got {window}")


def _axis_gradient(z: np.ndarray, axis: int, spacing: float) -> np.ndarray:
    """Central difference along axis, one-sided where a neighbor is missing.

    Samples with no valid neighbor along the axis get NaN.
    """
    n = z.shape[axis]
    valid = ~np.isnan(z)

    def shifted(a, offset, fill):
        out = np.full_like(a, fill)
        src = [slice(None)] * 2
        dst = [slice(None)] * 2
        if offset > 0:
            src[axis] = slice(offset, None)
            dst[axis] = slice(None, n - offset)
        else:
            src[axis] = slice(None, n + offset)
            dst[axis] = slice(-offset, None)
        out[tuple(dst)] = a[tuple(src)]
        return out

    nxt = shifted(z, 1, np.nan)
    prv = shifted(z, -1, np.nan)
    has_next = shifted(valid, 1, False) & valid
    has_prev = shifted(valid, -1, False) & valid

    with np.errstate(invalid="ignore"):
        central = (nxt - prv) / (2 * spacing)
        forward = (nxt - z) / spacing
        backward = (z - prv) / spacing
    return np.where(
        has_next & has_prev,
        central,
        np.where(has_next, forward, np.where(has_prev, backward, np.nan)),
    )


@unique
class NODATA_POLICY(str, Enum):
    """How no-data samples are classified."""

    OCCUPIED = "occupied"
    FREE = "free"


@dataclass(frozen=True, eq=False)
class ElevationRaster:
    """Elevation samples in meters, row-major, no-data stored as NaN."""

    values: np.ndarray
    ground_res_m: float = 1.0
    name: str = ""
    nodata_value: Optional[float] = None

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise InvalidDataError(f"Raster must be 2D, got shape {values.shape}")
        if not self.ground_res_m > 0:
            raise InvalidDataError(f"Invalid ground resolution: {self.ground_res_m}")
        if self.nodata_value is not None:
            values[values == self.nodata_value] = np.nan
        if np.isinf(values).any():
            raise InvalidDataError("Raster contains non-finite elevations")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def nodata_mask(self) -> np.ndarray:
        return np.isnan(self.values)


@dataclass(frozen=True)
class IngestConfig:
    slope_threshold_deg: float
    downsample_factor: int = 1
    roughness_threshold_m: Optional[float] = None
    roughness_window: int = DEFAULT_ROUGHNESS_WINDOW
    nodata_policy: NODATA_POLICY = NODATA_POLICY.OCCUPIED

    def __post_init__(self):
        if not 0 < self.slope_threshold_deg < 90:
            raise InvalidDataError(
                f"Slope threshold must be in (0, 90), got {self.slope_threshold_deg}"
            )
        if int(self.downsample_factor) != self.downsample_factor or (
            self.downsample_factor < 1
        ):
            raise InvalidDataError(
                f"Downsample factor must be a positive integer, "
                f"got {self.downsample_factor}"
            )
        if self.roughness_threshold_m is not None and not (
            self.roughness_threshold_m > 0
        ):
            raise InvalidDataError(
                f"Roughness threshold must be positive, "
                f"got {self.roughness_threshold_m}"
            )
        _check_window(self.roughness_window)
        object.__setattr__(self, "nodata_policy", NODATA_POLICY(self.nodata_policy))


# Published generation recipes. The Mars DTMs were downsampled per product to
# roughly 10 m per pixel, so their factor depends on the source resolution.
PRESETS: Dict[str, IngestConfig] = {
    "mars-10": IngestConfig(slope_threshold_deg=10.0),
    "mars-20": IngestConfig(slope_threshold_deg=20.0),
    "moon-10": IngestConfig(slope_threshold_deg=10.0, downsample_factor=64),
    "moon-15": IngestConfig(slope_threshold_deg=15.0, downsample_factor=64),
    "moon-20": IngestConfig(slope_threshold_deg=20.0, downsample_factor=64),
}


def compute_slope(raster: ElevationRaster) -> np.ndarray:
    """Per-sample slope angle in degrees, NaN for no-data or isolated samples."""
    if raster.width < 2 or raster.height < 2:
        raise InvalidDataError(
            f"Slope needs at least a 2x2 raster, got {raster.width}x{raster.height}"
        )
    z = raster.values
    gx = _axis_gradient(z, 1, raster.ground_res_m)
    gy = _axis_gradient(z, 0, raster.ground_res_m)
    return np.degrees(np.arctan(np.hypot(gx, gy)))


def _box_sum(a: np.ndarray, window: int) -> np.ndarray:
    """Sum over a centered window, clipped at the borders."""
    return correlate(a, np.ones((window, window)), mode="constant", cval=0.0)


def compute_roughness(raster: ElevationRaster, window: int) -> np.ndarray:
    """Std-dev of elevation around the best-fit plane of each window, in meters.

    Windows are clipped at the raster border and skip no-data samples.
    """
    _check_window(window)
    if window > raster.width or window > raster.height:
        raise InvalidDataError(
            f"Window {window} is larger than the {raster.width}x{raster.height} raster"
        )
    valid = ~raster.nodata_mask
    # Centered elevations keep the moment sums well conditioned
    z = np.where(valid, raster.values - np.nanmean(raster.values), 0.0)
    rows, cols = np.indices(z.shape, dtype=np.float64)
    w = valid.astype(np.float64)

    n = _box_sum(w, window)
    # Coordinates relative to each window's center: sum(x - c) = sum(x) - n * c
    sx = _box_sum(w * cols, window) - n * cols
    sy = _box_sum(w * rows, window) - n * rows
    sxx = _box_sum(w * cols**2, window) - 2 * cols * (sx + n * cols) + n * cols**2
    syy = _box_sum(w * rows**2, window) - 2 * rows * (sy + n * rows) + n * rows**2
    sxy = (
        _box_sum(w * rows * cols, window)
        - rows * (sx + n * cols)
        - cols * (sy + n * rows)
        + n * rows * cols
    )
    sz = _box_sum(z, window)
    sxz = _box_sum(z * cols, window) - cols * sz
    syz = _box_sum(z * rows, window) - rows * sz
    szz = _box_sum(z * z, window)

    # Least squares plane z = a + b x + c y, normal equations per sample
    normal = np.stack(
        [
            np.stack([n, sx, sy], axis=-1),
            np.stack([sx, sxx, sxy], axis=-1),
            np.stack([sy, sxy, syy], axis=-1),
        ],
        axis=-2,
    )
    rhs = np.stack([sz, sxz, syz], axis=-1)
    solvable = n >= 3
    normal[~solvable] = np.eye(3)
    rhs[~solvable] = 0.0
    # pinv tolerates the rank deficient systems of windows thinned by no-data
    coef = np.einsum("...ij,...j->...i", np.linalg.pinv(normal), rhs)
    fitted = np.einsum("...i,...i->...", coef, rhs)
    with np.errstate(invalid="ignore", divide="ignore"):
        variance = np.maximum(szz - fitted, 0.0) / n
    roughness = np.sqrt(variance)
    roughness[~valid | ~solvable] = np.nan
    return roughness


def downsample(raster: ElevationRaster, factor: int) -> ElevationRaster:
    """Block mean over factor x factor blocks, ignoring no-data samples.

    Partial blocks at the right and bottom edges are dropped. A block with only
    no-data samples stays no-data.
    """
    if factor == 1:
        return raster
    h, w = raster.height // factor, raster.width // factor
    if h < 1 or w < 1:
        raise InvalidDataError(
            f"Raster {raster.width}x{raster.height} is smaller than one "
            f"{factor}x{factor} block"
        )
    blocks = raster.values[: h * factor, : w * factor].reshape(h, factor, w, factor)
    valid = ~np.isnan(blocks)
    counts = valid.sum(axis=(1, 3))
    sums = np.where(valid, blocks, 0.0).sum(axis=(1, 3))
    with np.errstate(invalid="ignore", divide="ignore"):
        means = np.where(counts > 0, sums / counts, np.nan)
    return ElevationRaster(means, raster.ground_res_m * factor, raster.name)


def threshold_to_grid(raster: ElevationRaster, cfg: IngestConfig) -> OccupancyGrid:
    """Classify a raster into an occupancy grid."""
    small = downsample(raster, cfg.downsample_factor)
    if small.width < 2 or small.height < 2:
        raise InvalidDataError(
            f"Downsampled raster is {small.width}x{small.height}, need at least 2x2"
        )
    slope = compute_slope(small)
    unknown = np.isnan(slope)
    with np.errstate(invalid="ignore"):
        occupied = slope >= cfg.slope_threshold_deg - SLOPE_EPSILON_DEG
        if cfg.roughness_threshold_m is not None:
            roughness = compute_roughness(small, cfg.roughness_window)
            occupied |= roughness >= cfg.roughness_threshold_m
    if cfg.nodata_policy == NODATA_POLICY.OCCUPIED:
        occupied |= unknown
    else:
        occupied &= ~unknown
    cells = np.where(occupied, OCCUPIED, FREE)
    logger.info(
        "Thresholded %r at %.1f deg: %dx%d cells, %d occupied",
        raster.name,
        cfg.slope_threshold_deg,
        small.width,
        small.height,
        int(occupied.sum()),
    )
    return OccupancyGrid(cells, small.ground_res_m, raster.name)


def read_asc(path: PathLike) -> ElevationRaster:
    """Read an ESRI ASCII grid."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as e:
        raise FormatError(f"Unable to read raster: {e.strerror}", path)
    header: Dict[str, float] = {}
    lineno = 0
    for lineno, line in enumerate(lines, 1):
        parts = line.split()
        if not parts:
            continue
        key = parts[0].lower()
        if key not in _ASC_HEADER_KEYS:
            lineno -= 1
            break
        if len(parts) != 2:
            raise FormatError(f"Invalid header line {line!r}", path, lineno)
        try:
            header[key] = float(parts[1])
        except ValueError:
            raise FormatError(f"Invalid header value {parts[1]!r}", path, lineno)
    for key in ("ncols", "nrows", "cellsize"):
        if key not in header:
            raise FormatError(f"Missing {key} in header", path)

    ncols, nrows = int(header["ncols"]), int(header["nrows"])
    try:
        values = np.array(" ".join(lines[lineno:]).split(), dtype=np.float64)
    except ValueError as e:
        raise FormatError(f"Invalid elevation value: {e}", path)
    if values.size != ncols * nrows:
        raise FormatError(
            f"Expected {ncols * nrows} values ({ncols}x{nrows}), got {values.size}",
            path,
        )
    try:
        return ElevationRaster(
            values.reshape(nrows, ncols),
            header["cellsize"],
            path.stem,
            header.get("nodata_value"),
        )
    except InvalidDataError as e:
        raise FormatError(str(e), path)


def read_csv_raster(path: PathLike) -> ElevationRaster:
    """Read a CSV of elevations, with ground_res_m and nodata in a JSON sidecar."""
    path = Path(path)
    meta: Dict = {}
    meta_path = path.with_suffix(".json")
    if meta_path.is_file():
        try:
            meta = json.loads(meta_path.read_text())
        except ValueError as e:
            raise FormatError(f"Invalid sidecar JSON: {e}", meta_path)
    rows = []
    try:
        text = path.read_text()
    except OSError as e:
        raise FormatError(f"Unable to read raster: {e.strerror}", path)
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            row = [float(v) for v in line.split(",")]
        except ValueError:
            raise FormatError(f"Invalid elevation row {line!r}", path, lineno)
        if rows and len(row) != len(rows[0]):
            raise FormatError(
                f"Expected {len(rows[0])} columns, got {len(row)}", path, lineno
            )
        rows.append(row)
    if not rows:
        raise FormatError("Empty raster file", path)
    try:
        return ElevationRaster(
            np.array(rows),
            float(meta.get("ground_res_m", 1.0)),
            meta.get("name", path.stem),
            meta.get("nodata"),
        )
    except InvalidDataError as e:
        raise FormatError(str(e), path)


def geotiff_available() -> bool:
    return rasterio is not None


def read_geotiff(path: PathLike) -> ElevationRaster:
    """Read the first band of a GeoTIFF DTM/DEM."""
    if rasterio is None:
        raise InvalidDataError("GeoTIFF support requires the rasterio package")
    try:
        with rasterio.open(path) as dataset:
            values = dataset.read(1).astype(np.float64)
            res_x, res_y = dataset.res
            nodata = dataset.nodata
    except rasterio.errors.RasterioIOError as e:
        raise FormatError(f"Unable to read raster: {e}", path)
    if abs(res_x) != abs(res_y):
        logger.warning("Non-square pixels (%s, %s), using x resolution", res_x, res_y)
    return ElevationRaster(values, abs(res_x), Path(path).stem, nodata)


RASTER_READERS = {
    ".asc": read_asc,
    ".csv": read_csv_raster,
    ".tif": read_geotiff,
    ".tiff": read_geotiff,
}


def read_raster(path: PathLike) -> ElevationRaster:
    """Read an elevation raster, choosing the reader by file extension."""
    suffix = Path(path).suffix.lower()
    if suffix not in RASTER_READERS:
        raise FormatError(f"Unsupported raster format {suffix!r}", path)
    return RASTER_READERS[suffix](path)
