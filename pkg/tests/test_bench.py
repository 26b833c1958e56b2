from plankit import planning
from plankit.core import Cell, OccupancyGrid, FormatError, InvalidDataError
from plankit.core.io import write_grid
from plankit.planning import PLANNER, STATUS, PlannerConfig, PlanResult
from plankit.tasks import PlanningTask, sample_task, save_tasks
from planbench import bench
from planbench.bench import (
    load_manifest,
    load_maps,
    manifest_tasks,
    run_benchmark,
    run_trial,
    write_outputs,
)
from planbench.report import format_records, load_report, parse_records

import json
import threading
import time
import numpy as np
import pytest


PLANNERS = [PLANNER.DIJKSTRA, PLANNER.ASTAR, PLANNER.THETASTAR, PLANNER.RRT]


def make_grids():
    ridge = np.zeros((15, 15))
    ridge[:10, 7] = 1
    crater = np.zeros((12, 16))
    crater[4:8, 5:11] = 1
    return [OccupancyGrid(ridge, 5.0, "ridge"), OccupancyGrid(crater, 5.0, "crater")]


@pytest.fixture
def dataset(tmp_path):
    grids = make_grids()
    for grid in grids:
        write_grid(grid, tmp_path / f"{grid.name}.pgm")
    tasks = [sample_task(g, seed=1, budget_s=20.0) for g in grids]
    save_tasks(tmp_path / "tasks.csv", tasks)
    save_tasks(tmp_path / "ridge_task.csv", tasks[:1])
    manifest = {
        "dataset_name": "Synthetic",
        "provenance": "unit test",
        "maps": [
            {"grid": "ridge.pgm", "task": "ridge_task.csv"},
            {"grid": "crater.pgm"},
        ],
    }
    path = tmp_path / "dataset.json"
    path.write_text(json.dumps(manifest))
    return path, tasks


def configs(kinds=PLANNERS):
    return [PlannerConfig(k, seed=7) for k in kinds]


class TestManifest:
    def test_load(self, dataset):
        path, _ = dataset
        manifest = load_manifest(path)
        assert manifest.dataset_name == "Synthetic"
        assert manifest.provenance == "unit test"
        assert [e.grid.name for e in manifest.entries] == ["ridge.pgm", "crater.pgm"]
        assert manifest.entries[0].grid.is_absolute() == path.is_absolute()
        assert manifest.entries[1].task is None

    def test_tasks_from_manifest(self, dataset):
        path, tasks = dataset
        assert manifest_tasks(load_manifest(path)) == tasks[:1]

    def test_load_maps(self, dataset):
        path, _ = dataset
        maps = load_maps(load_manifest(path))
        assert list(maps) == ["ridge", "crater"]
        assert maps["ridge"].grid == make_grids()[0]
        assert maps["ridge"].preprocess_time_s >= 0

    @pytest.mark.parametrize(
        "content",
        [
            "{",
            json.dumps({"maps": [{"grid": "ridge.pgm"}]}),
            json.dumps({"dataset_name": "x", "maps": []}),
            json.dumps({"dataset_name": "x", "maps": [{"grid": "missing.pgm"}]}),
        ],
    )
    def test_invalid(self, dataset, content):
        path, _ = dataset
        bad = path.with_name("bad.json")
        bad.write_text(content)
        with pytest.raises(FormatError):
            load_manifest(bad)


class TestRunBenchmark:
    def test_every_pair_once(self, dataset):
        path, tasks = dataset
        report = run_benchmark(
            load_manifest(path), configs(), tasks, track_memory=False
        )
        assert len(report.records) == 2 * len(PLANNERS)
        keys = [(r.task.grid_name, r.planner_kind) for r in report.records]
        assert keys == sorted(
            set(keys), key=lambda k: (k[0], list(PLANNER).index(k[1]))
        )
        assert all(r.success for r in report.records)
        assert all(r.dataset_name == "Synthetic" for r in report.records)
        assert report.is_consistent()
        assert [row.planner_kind for row in report.aggregates] == PLANNERS
        assert report.config["budget_s"] == 20.0
        assert report.config["dataset"]["dataset_name"] == "Synthetic"
        assert "python" in report.fingerprint

    def test_deviation_against_astar(self, dataset):
        path, tasks = dataset
        report = run_benchmark(
            load_manifest(path), configs(), tasks, track_memory=False
        )
        for r in report.records:
            if r.planner_kind in (PLANNER.DIJKSTRA, PLANNER.ASTAR):
                assert r.path_deviation == 0.0
            else:
                assert r.path_deviation is not None

    def test_deterministic(self, dataset):
        path, tasks = dataset
        manifest = load_manifest(path)
        first = run_benchmark(manifest, configs(), tasks, track_memory=False)
        second = run_benchmark(manifest, configs(), tasks, track_memory=False)
        assert format_records(first.records, mask=True) == format_records(
            second.records, mask=True
        )

    def test_workers(self, dataset):
        path, tasks = dataset
        manifest = load_manifest(path)
        serial = run_benchmark(manifest, configs(), tasks, track_memory=False)
        parallel = run_benchmark(
            manifest, configs(), tasks, workers=2, track_memory=False
        )
        assert format_records(serial.records, mask=True) == format_records(
            parallel.records, mask=True
        )

    def test_rejects_repeated_planner(self, dataset):
        path, tasks = dataset
        with pytest.raises(InvalidDataError):
            run_benchmark(
                load_manifest(path), configs([PLANNER.RRT, PLANNER.RRT]), tasks
            )

    def test_rejects_missing_task(self, dataset):
        path, tasks = dataset
        with pytest.raises(InvalidDataError):
            run_benchmark(load_manifest(path), configs(), tasks[:1])

    def test_rejects_no_planners(self, dataset):
        path, tasks = dataset
        with pytest.raises(InvalidDataError):
            run_benchmark(load_manifest(path), [], tasks)

    def test_budget_override(self, dataset):
        path, tasks = dataset
        short = [PlanningTask(t.grid_name, t.start, t.goal, 5.0, t.seed) for t in tasks]
        report = run_benchmark(
            load_manifest(path), configs([PLANNER.ASTAR]), short, track_memory=False
        )
        assert report.config["budget_s"] == 5.0


class TestRunTrial:
    GRID = OccupancyGrid(np.zeros((5, 5)), name="flat")
    TASK = PlanningTask("flat", Cell(0, 0), Cell(4, 4), 0.05)

    def test_watchdog_abandons_stalled_planner(self, monkeypatch):
        def stall(grid, task, cfg, deadline):
            time.sleep(1.0)
            return PlanResult(STATUS.SUCCESS, [task.start, task.goal])

        monkeypatch.setattr(planning, "get_planner", lambda kind: stall)
        t0 = time.monotonic()
        record = run_trial(
            "d",
            self.GRID,
            self.TASK,
            PlannerConfig(PLANNER.ASTAR),
            watchdog_slack_s=0.1,
            track_memory=False,
        )
        assert time.monotonic() - t0 < 0.9
        assert record.result.status == STATUS.TIMEOUT
        assert record.result.path == [Cell(0, 0)]
        assert record.error == "Planner ignored its deadline and was abandoned"
        assert record.distance_left == pytest.approx(4 * 2**0.5)

    def test_memory_not_tracked_while_abandoned_trial_runs(self, monkeypatch):
        release = threading.Event()

        def stall(grid, task, cfg, deadline):
            release.wait(5.0)
            return PlanResult(STATUS.SUCCESS, [task.start, task.goal])

        def allocate(grid, task, cfg, deadline):
            block = [0] * 100_000
            del block
            return PlanResult(STATUS.SUCCESS, [task.start, task.goal])

        cfg = PlannerConfig(PLANNER.ASTAR)
        task = PlanningTask("flat", Cell(0, 0), Cell(4, 4), 10.0)
        monkeypatch.setattr(planning, "get_planner", lambda kind: stall)
        run_trial(
            "d", self.GRID, self.TASK, cfg, watchdog_slack_s=0.1, track_memory=False
        )
        monkeypatch.setattr(planning, "get_planner", lambda kind: allocate)
        try:
            assert run_trial("d", self.GRID, task, cfg).result.peak_memory_kib == 0.0
        finally:
            release.set()
        for straggler in list(bench._abandoned):
            straggler.join(5.0)
        assert run_trial("d", self.GRID, task, cfg).result.peak_memory_kib > 0

    def test_planner_error_is_recorded(self, monkeypatch):
        def broken(grid, task, cfg, deadline):
            raise RuntimeError("boom")

        monkeypatch.setattr(planning, "get_planner", lambda kind: broken)
        record = run_trial(
            "d", self.GRID, self.TASK, PlannerConfig(PLANNER.RRT), track_memory=False
        )
        assert record.result.status == STATUS.ERROR
        assert record.result.path == [Cell(0, 0)]
        assert record.error == "RuntimeError: boom"
        assert not record.success

    def test_success(self):
        task = PlanningTask("flat", Cell(0, 0), Cell(4, 4), 10.0)
        record = run_trial("d", self.GRID, task, PlannerConfig(PLANNER.THETASTAR))
        assert record.success
        assert record.error is None
        assert record.result.path == [Cell(0, 0), Cell(4, 4)]
        assert record.clearance_cells == 1.0


def test_write_outputs(dataset, tmp_path):
    path, tasks = dataset
    manifest = load_manifest(path)
    maps = load_maps(manifest)
    report = run_benchmark(
        manifest, configs(), tasks, maps=maps, track_memory=False
    )
    out = tmp_path / "out"
    written = write_outputs(report, out, maps)

    for name in ("records.jsonl", "aggregates.csv", "report.md", "report.json"):
        assert (out / name).is_file()
    overlays = sorted(p.name for p in (out / "overlays").iterdir())
    assert len(overlays) == len(report.records)
    assert "ridge_thetastar.svg" in overlays
    assert len(written) == 4 + len(overlays)

    assert parse_records((out / "records.jsonl").read_text()) == report.records
    loaded = load_report(out / "report.json")
    assert loaded.aggregates == report.aggregates


def test_write_outputs_without_overlays(dataset, tmp_path):
    path, tasks = dataset
    report = run_benchmark(
        load_manifest(path), configs([PLANNER.ASTAR]), tasks, track_memory=False
    )
    write_outputs(report, tmp_path / "out")
    assert not (tmp_path / "out" / "overlays").exists()
