from plankit.core import OccupancyGrid
from plankit.core.io import read_grid, write_grid
from plankit.tasks import load_tasks
from planbench import __version__
from planbench.cli.__main__ import cli, dispatch, EXIT_USAGE
from planbench.cli.util import EXIT_FAILURE
from planbench.settings import RunConfig, SUBCOMMANDS
from .util import file_path

import json
import logging
import shutil
import numpy as np
import pytest
from click.testing import CliRunner


def planbench(*argv):
    return dispatch([str(a) for a in argv])


@pytest.fixture
def workspace(tmp_path):
    maps = tmp_path / "maps"
    maps.mkdir()
    ridge = np.zeros((12, 12))
    ridge[:8, 6] = 1
    write_grid(OccupancyGrid(ridge, name="ridge"), maps / "ridge.pgm")
    write_grid(OccupancyGrid(np.zeros((8, 10)), name="plain"), maps / "plain.csv")
    manifest = {
        "dataset_name": "Tiny",
        "maps": [{"grid": "maps/ridge.pgm"}, {"grid": "maps/plain.csv"}],
    }
    (tmp_path / "dataset.json").write_text(json.dumps(manifest))
    return tmp_path


class TestGroup:
    def test_version(self, capsys):
        assert planbench("--version") == 0
        assert __version__ in capsys.readouterr().out

    def test_diagnose(self, capsys):
        assert planbench("--diagnose") == 0
        out = capsys.readouterr().out
        assert "Fingerprint:" in out
        assert out.rstrip().endswith("End of diagnostics")

    def test_help_lists_commands_in_pipeline_order(self, capsys):
        assert planbench("--help") == 0
        out = capsys.readouterr().out
        positions = [
            out.index(f"  {name} ")
            for name in ("ingest", "sample-tasks", "plan", "bench", "report")
        ]
        assert positions == sorted(positions)

    def test_runner(self, workspace):
        runner = CliRunner()
        ridge = str(workspace / "maps" / "ridge.pgm")
        args = ["plan", "--map", ridge, "--planner", "dijkstra"]
        result = runner.invoke(cli, args + ["--start", "11,0", "--goal", "11,11"])
        assert result.exit_code == 0, result.output
        assert json.loads(result.output)["waypoints"][-1] == [11, 11]

    def test_unknown_command(self, capsys):
        assert planbench("frobnicate") == EXIT_USAGE

    def test_log_file(self, workspace):
        log = workspace / "logs" / "run.log"
        maps = ["--maps", workspace / "maps", "--out", workspace / "tasks.csv"]
        try:
            args = ["--log-level", "debug", "--log-file", log, "sample-tasks"]
            assert planbench(*args, *maps) == 0
        finally:
            logging.basicConfig(handlers=[logging.NullHandler()], force=True)
            logging.disable(logging.CRITICAL * 2)
        assert "Initialized logging" in log.read_text()


class TestIngest:
    def test_file(self, tmp_path, capsys):
        out = tmp_path / "mound.pgm"
        assert (
            planbench(
                "ingest",
                "--input",
                file_path("synthetic_20x20.asc"),
                "--slope-deg",
                15,
                "--out",
                out,
            )
            == 0
        )
        grid = read_grid(out)
        assert grid.shape == (20, 20)
        assert grid.cells.sum() == 28
        assert "20x20 cells" in capsys.readouterr().out

    def test_preset_with_override(self, tmp_path):
        out = tmp_path / "mound.csv"
        source = file_path("synthetic_20x20.asc")
        args = ["--preset", "moon-15", "--downsample", 2, "--out", out]
        assert planbench("ingest", "--input", source, *args) == 0
        grid = read_grid(out)
        assert grid.shape == (10, 10)
        assert grid.resolution_m == 2.0
        assert grid.cells.sum() == 12

    def test_directory(self, tmp_path):
        rasters = tmp_path / "dtms"
        rasters.mkdir()
        shutil.copy(file_path("synthetic_20x20.asc"), rasters / "a.asc")
        shutil.copy(file_path("synthetic_20x20.asc"), rasters / "b.asc")
        (rasters / "notes.txt").write_text("ignored")
        out = tmp_path / "grids"
        args = ["--slope-deg", 20, "--format", "csv", "--out", out]
        assert planbench("ingest", "--input", rasters, *args) == 0
        assert sorted(p.name for p in out.glob("*.csv")) == ["a.csv", "b.csv"]

    def test_threshold_required(self, tmp_path, capsys):
        source = file_path("synthetic_20x20.asc")
        code = planbench("ingest", "--input", source, "--out", tmp_path / "x.pgm")
        assert code == EXIT_USAGE
        assert "--slope-deg" in capsys.readouterr().err

    def test_slope_out_of_range(self, tmp_path):
        source = file_path("synthetic_20x20.asc")
        args = ["--slope-deg", 90, "--out", tmp_path / "x.pgm"]
        assert planbench("ingest", "--input", source, *args) == EXIT_USAGE

    def test_bad_raster(self, tmp_path, capsys):
        source = tmp_path / "broken.asc"
        source.write_text("ncols 2\nnrows 2\n1 2 3 4\n")
        args = ["--slope-deg", 10, "--out", tmp_path / "x.pgm"]
        assert planbench("ingest", "--input", source, *args) == EXIT_FAILURE
        assert "Error: " in capsys.readouterr().err


class TestSampleTasks:
    def test_one_task_per_map(self, workspace, capsys):
        out = workspace / "tasks.csv"
        args = ["--maps", workspace / "maps", "--out", out, "--seed", 3]
        assert planbench("sample-tasks", *args) == 0
        tasks = load_tasks(out)
        assert sorted(t.grid_name for t in tasks) == ["plain", "ridge"]
        assert all(t.seed == 3 for t in tasks)
        assert "ridge: " in capsys.readouterr().out

    def test_global_seed(self, workspace):
        out = workspace / "tasks.csv"
        args = ["--maps", workspace / "maps", "--out", out]
        assert planbench("--seed", 9, "sample-tasks", *args) == 0
        assert {t.seed for t in load_tasks(out)} == {9}

    def test_empty_directory(self, tmp_path):
        (tmp_path / "empty").mkdir()
        args = ["--maps", tmp_path / "empty", "--out", tmp_path / "t.csv"]
        assert planbench("sample-tasks", *args) == EXIT_USAGE


class TestPlan:
    def test_json_result(self, workspace, capsys):
        args = ["--map", workspace / "maps" / "ridge.pgm", "--planner", "astar"]
        assert planbench("plan", *args, "--start", "0,0", "--goal", "0,11") == 0
        data = json.loads(capsys.readouterr().out)
        assert data["status"] == "success"
        assert data["feasible"] is True
        assert data["waypoints"][0] == [0, 0]
        assert data["waypoints"][-1] == [0, 11]
        assert data["config"]["planner_kind"] == "astar"

    def test_out_and_overlay(self, workspace):
        out, svg = workspace / "plan.json", workspace / "plan.svg"
        args = ["--map", workspace / "maps" / "ridge.pgm", "--planner", "rrt-connect"]
        args += ["--start", "0,0", "--goal", "0,11", "--seed", 4, "--epsilon", 3]
        assert planbench("plan", *args, "--out", out, "--overlay", svg) == 0
        data = json.loads(out.read_text())
        assert data["config"]["planner_kind"] == "rrt_connect"
        assert data["config"]["epsilon"] == 3.0
        assert svg.read_bytes().startswith(b"<?xml")

    def test_start_outside_map(self, workspace):
        args = ["--map", workspace / "maps" / "ridge.pgm", "--planner", "astar"]
        code = planbench("plan", *args, "--start", "40,0", "--goal", "0,11")
        assert code == EXIT_USAGE

    @pytest.mark.parametrize(
        "option, value", [("--planner", "prm"), ("--start", "0;0"), ("--goal", "x")]
    )
    def test_bad_values(self, workspace, option, value):
        args = {
            "--map": workspace / "maps" / "ridge.pgm",
            "--planner": "astar",
            "--start": "0,0",
            "--goal": "0,11",
        }
        args[option] = value
        flat = [v for kv in args.items() for v in kv]
        assert planbench("plan", *flat) == EXIT_USAGE


class TestBenchAndReport:
    def run_bench(self, workspace, *extra):
        tasks = workspace / "tasks.csv"
        planbench("sample-tasks", "--maps", workspace / "maps", "--out", tasks)
        return planbench(
            "bench",
            "--manifest",
            workspace / "dataset.json",
            "--tasks",
            tasks,
            "--no-memory",
            *extra,
        )

    def test_bench(self, workspace, capsys):
        out = workspace / "out"
        code = self.run_bench(
            workspace, "--planners", "dijkstra,astar,rrt", "--out-dir", out
        )
        assert code == 0
        assert "6 trials on 2 maps: 6 success" in capsys.readouterr().out
        records = (out / "records.jsonl").read_text().splitlines()
        assert len(records) == 6
        assert len(list((out / "overlays").glob("*.svg"))) == 6

    def test_out_dir_from_environment(self, workspace, monkeypatch):
        out = workspace / "from-env"
        monkeypatch.setenv("PLANBENCH_OUT_DIR", str(out))
        assert self.run_bench(workspace, "--planners", "astar", "--no-overlays") == 0
        assert (out / "report.json").is_file()
        assert not (out / "overlays").exists()

    def test_config_file(self, workspace):
        config = workspace / "run.toml"
        config.write_text('seed = 2\n\n[bench]\nplanners = "thetastar"\n')
        out = workspace / "out"
        tasks = workspace / "tasks.csv"
        planbench("sample-tasks", "--maps", workspace / "maps", "--out", tasks)
        args = ["--manifest", workspace / "dataset.json", "--tasks", tasks]
        assert planbench("-c", config, "bench", *args, "--out-dir", out) == 0
        lines = (out / "records.jsonl").read_text().splitlines()
        assert {json.loads(line)["planner"] for line in lines} == {"thetastar"}
        assert {json.loads(line)["config"]["seed"] for line in lines} == {2}

    def test_config_flag_wins(self, workspace):
        config = workspace / "run.json"
        config.write_text(json.dumps({"bench": {"planners": "thetastar"}}))
        out = workspace / "out"
        args = ["--planners", "astar", "--out-dir", out]
        tasks = workspace / "tasks.csv"
        planbench("sample-tasks", "--maps", workspace / "maps", "--out", tasks)
        manifest = ["--manifest", workspace / "dataset.json", "--tasks", tasks]
        assert planbench("--config", config, "bench", *manifest, *args) == 0
        lines = (out / "records.jsonl").read_text().splitlines()
        assert {json.loads(line)["planner"] for line in lines} == {"astar"}

    def test_bad_config_section(self, workspace, capsys):
        config = workspace / "run.toml"
        config.write_text("[benchmark]\nplanners = 'astar'\n")
        assert planbench("-c", config, "bench", "--help") == EXIT_FAILURE
        assert "Unknown config sections" in capsys.readouterr().err

    def test_no_tasks(self, workspace):
        out = workspace / "out"
        code = planbench(
            "bench", "--manifest", workspace / "dataset.json", "--out-dir", out
        )
        assert code == EXIT_USAGE

    def test_repeated_planner(self, workspace):
        out = workspace / "out"
        code = self.run_bench(workspace, "--planners", "astar,astar", "--out-dir", out)
        assert code == EXIT_USAGE

    def test_report(self, workspace, capsys):
        out = workspace / "out"
        self.run_bench(workspace, "--planners", "astar,thetastar", "--out-dir", out)
        capsys.readouterr()
        assert planbench("report", "--input", out / "report.json", "-F", "csv") == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].startswith("planner,")
        assert [line.split(",")[0] for line in lines[1:]] == ["astar", "thetastar"]

        md = workspace / "report.md"
        assert planbench("report", "--input", out / "report.json", "-o", md) == 0
        assert md.read_text().startswith("# Benchmark results")

    def test_report_rejects_tampering(self, workspace, capsys):
        out = workspace / "out"
        self.run_bench(workspace, "--planners", "astar", "--out-dir", out)
        path = out / "report.json"
        data = json.loads(path.read_text())
        data["aggregates"][0]["success_rate_pct"] = 50.0
        path.write_text(json.dumps(data))
        assert planbench("report", "--input", path) == EXIT_FAILURE
        assert "do not match" in capsys.readouterr().err

    def test_unexpected_failure(self, workspace, monkeypatch, capsys):
        def broken_pool(*args, **kwargs):
            raise RuntimeError("worker died")

        monkeypatch.setattr("planbench.cli.bench.run_benchmark", broken_pool)
        out = workspace / "out"
        code = self.run_bench(workspace, "--planners", "astar", "--out-dir", out)
        assert code == EXIT_FAILURE
        assert "Error: RuntimeError: worker died" in capsys.readouterr().err


class TestRunConfig:
    def test_empty(self):
        settings = RunConfig()
        assert settings == {}
        assert settings.fname is None
        assert settings.default_map() == {name: {} for name in SUBCOMMANDS}

    def test_command_table_overrides_common(self, tmp_path):
        config = tmp_path / "run.toml"
        config.write_text('seed = 2\nout-dir = "a"\n\n[bench]\nout-dir = "b"\n')
        settings = RunConfig(config)
        assert settings.for_command("bench") == {"seed": 2, "out_dir": "b"}
        assert settings.default_map()["plan"] == {"seed": 2, "out_dir": "a"}
