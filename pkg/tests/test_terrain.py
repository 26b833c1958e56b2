from plankit.core import FormatError, InvalidDataError, OCCUPIED, FREE
from plankit.terrain import (
    ElevationRaster,
    IngestConfig,
    NODATA_POLICY,
    PRESETS,
    compute_roughness,
    compute_slope,
    downsample,
    geotiff_available,
    read_asc,
    read_csv_raster,
    read_geotiff,
    read_raster,
    threshold_to_grid,
)
from .util import file_path

import json
import math
import numpy as np
from scipy import ndimage
import pytest


def tilted_plane(height, width, slope_deg, res=1.0):
    cols = np.tile(np.arange(width, dtype=np.float64), (height, 1))
    return ElevationRaster(cols * res * math.tan(math.radians(slope_deg)), res)


def fractal_raster(size, seed, octaves=5, relief_m=40.0):
    """Seeded multi-octave value noise, quantized so offsets add exactly."""
    rng = np.random.default_rng(seed)
    values = np.zeros((size, size))
    for k in range(octaves):
        coarse = rng.random((2**k + 1, 2**k + 1))
        values += ndimage.zoom(coarse, size / coarse.shape[0], order=1) / 2**k
    return ElevationRaster(np.round(values * relief_m * 64) / 64, 1.0, "fractal")


class TestElevationRaster:
    def test_nodata_becomes_nan(self):
        raster = ElevationRaster([[1, -9999], [2, 3]], nodata_value=-9999)
        assert raster.nodata_mask.tolist() == [[False, True], [False, False]]

    def test_rejects_infinity(self):
        with pytest.raises(InvalidDataError):
            ElevationRaster([[1, np.inf]])

    def test_rejects_bad_shape(self):
        with pytest.raises(InvalidDataError):
            ElevationRaster([1, 2, 3])

    def test_rejects_bad_resolution(self):
        with pytest.raises(InvalidDataError):
            ElevationRaster([[1, 2]], ground_res_m=-1)


class TestIngestConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"slope_threshold_deg": 0},
            {"slope_threshold_deg": 90},
            {"slope_threshold_deg": 10, "downsample_factor": 0},
            {"slope_threshold_deg": 10, "downsample_factor": 1.5},
            {"slope_threshold_deg": 10, "roughness_threshold_m": 0},
            {"slope_threshold_deg": 10, "roughness_window": 4},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidDataError):
            IngestConfig(**kwargs)

    def test_presets(self):
        assert PRESETS["moon-15"].slope_threshold_deg == 15.0
        assert PRESETS["moon-15"].downsample_factor == 64
        assert PRESETS["mars-20"].downsample_factor == 1

    def test_nodata_policy_from_string(self):
        cfg = IngestConfig(10.0, nodata_policy="free")
        assert cfg.nodata_policy == NODATA_POLICY.FREE


class TestSlope:
    def test_flat(self):
        slope = compute_slope(ElevationRaster(np.zeros((4, 5))))
        assert np.allclose(slope, 0.0)

    def test_plane(self):
        slope = compute_slope(tilted_plane(4, 6, 30.0, res=2.0))
        assert np.allclose(slope, 30.0)

    def test_nodata_neighbors_use_one_sided_difference(self):
        values = np.tile(np.arange(5, dtype=np.float64), (3, 1))
        values[1, 2] = np.nan
        slope = compute_slope(ElevationRaster(values))
        assert np.isnan(slope[1, 2])
        assert np.allclose(slope[1, [1, 3]], 45.0)

    def test_too_small(self):
        with pytest.raises(InvalidDataError):
            compute_slope(ElevationRaster([[1.0, 2.0]]))


class TestRoughness:
    def test_plane_is_smooth(self):
        roughness = compute_roughness(tilted_plane(6, 6, 20.0), 3)
        assert np.allclose(roughness, 0.0, atol=1e-6)

    def test_bump_is_rough(self):
        values = np.zeros((5, 5))
        values[2, 2] = 3.0
        roughness = compute_roughness(ElevationRaster(values), 3)
        assert roughness[2, 2] > 0.5
        assert roughness[0, 4] == pytest.approx(0.0, abs=1e-6)

    def test_window_too_large(self):
        with pytest.raises(InvalidDataError):
            compute_roughness(ElevationRaster(np.zeros((3, 3))), 5)


class TestDownsample:
    def test_block_mean(self):
        values = np.arange(16, dtype=np.float64).reshape(4, 4)
        small = downsample(ElevationRaster(values, 2.0, "t"), 2)
        assert small.values.tolist() == [[2.5, 4.5], [10.5, 12.5]]
        assert small.ground_res_m == 4.0
        assert small.name == "t"

    def test_partial_blocks_dropped(self):
        small = downsample(ElevationRaster(np.zeros((5, 7))), 2)
        assert small.values.shape == (2, 3)

    def test_nodata_ignored(self):
        values = np.array([[1.0, np.nan], [3.0, np.nan]])
        assert downsample(ElevationRaster(values), 2).values.tolist() == [[2.0]]
        empty = downsample(ElevationRaster(np.full((2, 2), np.nan)), 2)
        assert np.isnan(empty.values[0, 0])

    def test_factor_too_large(self):
        with pytest.raises(InvalidDataError):
            downsample(ElevationRaster(np.zeros((3, 3))), 4)


class TestThreshold:
    def test_threshold_is_inclusive(self):
        raster = tilted_plane(4, 4, 30.0)
        assert (threshold_to_grid(raster, IngestConfig(30.0)).cells == OCCUPIED).all()
        assert (threshold_to_grid(raster, IngestConfig(31.0)).cells == FREE).all()

    def test_nodata_policy(self):
        values = np.zeros((4, 4))
        values[0, 0] = np.nan
        raster = ElevationRaster(values)
        occupied = threshold_to_grid(raster, IngestConfig(10.0))
        assert occupied.cells[0, 0] == OCCUPIED
        assert occupied.cells.sum() == 1
        free = threshold_to_grid(raster, IngestConfig(10.0, nodata_policy="free"))
        assert free.cells.sum() == 0

    def test_roughness_adds_obstacles(self):
        values = np.zeros((5, 5))
        values[2, 2] = 0.01
        raster = ElevationRaster(values, 10.0)
        assert threshold_to_grid(raster, IngestConfig(45.0)).cells.sum() == 0
        rough = IngestConfig(45.0, roughness_threshold_m=0.001)
        assert threshold_to_grid(raster, rough).cells[2, 2] == OCCUPIED

    def test_downsampled_too_small(self):
        with pytest.raises(InvalidDataError):
            threshold_to_grid(
                ElevationRaster(np.zeros((3, 3))), IngestConfig(10.0, 2)
            )

    @pytest.mark.parametrize("seed", range(5))
    def test_higher_threshold_never_adds_obstacles(self, seed):
        raster = fractal_raster(64, seed)
        thresholds = [5.0, 10.0, 15.0, 20.0, 30.0, 45.0]
        grids = [threshold_to_grid(raster, IngestConfig(t)).cells for t in thresholds]
        for lower, higher in zip(grids, grids[1:]):
            assert not ((higher == OCCUPIED) & (lower == FREE)).any()

    @pytest.mark.parametrize("seed", range(5))
    def test_elevation_offset_is_ignored(self, seed):
        raster = fractal_raster(64, seed)
        raised = ElevationRaster(raster.values + 1024.0, raster.ground_res_m)
        for cfg in (IngestConfig(15.0), IngestConfig(15.0, 2, 0.5)):
            expected = threshold_to_grid(raster, cfg).cells
            assert np.array_equal(threshold_to_grid(raised, cfg).cells, expected)


class TestSyntheticMound:
    # 20x20 flat raster, 1 m cells, with a 5 m block on rows and cols 8-11
    def test_read(self):
        raster = read_asc(file_path("synthetic_20x20.asc"))
        assert (raster.height, raster.width) == (20, 20)
        assert raster.ground_res_m == 1.0
        assert raster.name == "synthetic_20x20"
        assert raster.values.max() == 5.0

    def test_mound_edges_occupied(self):
        raster = read_raster(file_path("synthetic_20x20.asc"))
        grid = threshold_to_grid(raster, IngestConfig(15.0))
        assert grid.cells.sum() == 28
        assert grid.cells[7, 8] == OCCUPIED
        assert grid.cells[8, 7] == OCCUPIED
        assert grid.cells[7, 7] == FREE
        # Top of the block is flat again
        assert grid.cells[9, 9] == FREE
        assert grid.cells[0, 0] == FREE

    def test_only_corners_above_70(self):
        raster = read_asc(file_path("synthetic_20x20.asc"))
        grid = threshold_to_grid(raster, IngestConfig(70.0))
        rows, cols = np.nonzero(grid.cells)
        assert sorted(zip(rows.tolist(), cols.tolist())) == [
            (8, 8),
            (8, 11),
            (11, 8),
            (11, 11),
        ]

    def test_downsampled(self):
        raster = read_asc(file_path("synthetic_20x20.asc"))
        grid = threshold_to_grid(raster, IngestConfig(15.0, downsample_factor=2))
        assert grid.shape == (10, 10)
        assert grid.resolution_m == 2.0
        assert grid.cells.sum() == 12


class TestReaders:
    def test_asc_nodata(self, tmp_path):
        path = tmp_path / "n.asc"
        path.write_text(
            "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 5\n"
            "nodata_value -1\n1 -1\n2 3\n"
        )
        raster = read_asc(path)
        assert raster.ground_res_m == 5.0
        assert raster.nodata_mask.sum() == 1

    @pytest.mark.parametrize(
        "text",
        [
            "ncols 2\nnrows 2\n1 2 3 4\n",
            "ncols 2\nnrows 2\ncellsize 1\n1 2 3\n",
            "ncols 2\nnrows 2\ncellsize x\n1 2 3 4\n",
            "ncols 2\nnrows 2\ncellsize 1\n1 2 a 4\n",
        ],
    )
    def test_asc_malformed(self, tmp_path, text):
        path = tmp_path / "bad.asc"
        path.write_text(text)
        with pytest.raises(FormatError):
            read_asc(path)

    def test_csv_with_sidecar(self, tmp_path):
        path = tmp_path / "dem.csv"
        path.write_text("1.5,2\n3,-32768\n")
        path.with_suffix(".json").write_text(
            json.dumps({"ground_res_m": 20, "nodata": -32768, "name": "hirise"})
        )
        raster = read_csv_raster(path)
        assert raster.ground_res_m == 20.0
        assert raster.name == "hirise"
        assert raster.nodata_mask.tolist() == [[False, False], [False, True]]

    def test_csv_ragged(self, tmp_path):
        path = tmp_path / "dem.csv"
        path.write_text("1,2\n3\n")
        with pytest.raises(FormatError):
            read_csv_raster(path)

    def test_unsupported_suffix(self, tmp_path):
        with pytest.raises(FormatError):
            read_raster(tmp_path / "dem.img")

    @pytest.mark.skipif(geotiff_available(), reason="rasterio is installed")
    def test_geotiff_needs_rasterio(self, tmp_path):
        with pytest.raises(InvalidDataError):
            read_geotiff(tmp_path / "dem.tif")
