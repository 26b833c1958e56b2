from plankit.core import Cell, OccupancyGrid, FormatError, InvalidDataError
from plankit.core import NoFreeSpaceError, is_free
from plankit.tasks import (
    PlanningTask,
    format_tasks,
    largest_free_component,
    load_tasks,
    parse_tasks,
    sample_task,
    save_tasks,
)
from .util import random_grid

import numpy as np
import pytest


TWO_ROOMS = OccupancyGrid.from_rows(
    [
        [0, 0, 1, 0, 0, 0],
        [0, 0, 1, 0, 0, 0],
        [1, 1, 1, 0, 0, 0],
    ],
    name="rooms",
)


class TestLargestFreeComponent:
    def test_picks_largest(self):
        component = largest_free_component(TWO_ROOMS)
        assert len(component) == 9
        assert Cell(0, 0) not in component

    def test_tie_goes_to_first(self):
        grid = OccupancyGrid.from_rows([[0, 1, 0]])
        assert largest_free_component(grid) == {Cell(0, 0)}

    def test_diagonal_touch_is_not_connected(self):
        grid = OccupancyGrid.from_rows([[0, 1], [1, 0]])
        assert largest_free_component(grid) == {Cell(0, 0)}

    def test_no_free_space(self):
        with pytest.raises(NoFreeSpaceError):
            largest_free_component(OccupancyGrid(np.ones((3, 3))))


class TestSampleTask:
    def test_corridor_ends(self):
        grid = OccupancyGrid(np.zeros((1, 7)), name="corridor")
        task = sample_task(grid, seed=3, budget_s=5.0)
        assert {task.start, task.goal} == {Cell(0, 0), Cell(0, 6)}
        assert task.grid_name == "corridor"
        assert (task.budget_s, task.seed) == (5.0, 3)

    def test_inside_largest_component(self):
        for seed in range(5):
            task = sample_task(TWO_ROOMS, seed)
            component = largest_free_component(TWO_ROOMS)
            assert task.start in component
            assert task.goal in component
            assert task.start != task.goal

    def test_deterministic(self):
        grid = random_grid(30, 30, 0.3, seed=11)
        assert sample_task(grid, 4) == sample_task(grid, 4)

    def test_ends_are_free(self):
        grid = random_grid(25, 25, 0.35, seed=2)
        task = sample_task(grid, 0)
        assert is_free(grid, task.start)
        assert is_free(grid, task.goal)

    def test_single_free_cell(self):
        grid = OccupancyGrid.from_rows([[1, 1], [1, 0]])
        task = sample_task(grid, 0)
        assert task.start == task.goal == Cell(1, 1)
        assert task.degenerate

    def test_no_free_space(self):
        with pytest.raises(NoFreeSpaceError):
            sample_task(OccupancyGrid(np.ones((2, 2))), 0)


class TestPlanningTask:
    def test_cells_are_normalized(self):
        task = PlanningTask("m", (1, 2), [3, 4])
        assert task.start == Cell(1, 2)
        assert isinstance(task.goal, Cell)

    def test_invalid(self):
        with pytest.raises(InvalidDataError):
            PlanningTask("m", Cell(0, 0), Cell(1, 1), budget_s=0)
        with pytest.raises(InvalidDataError):
            PlanningTask("m", Cell(0, 0), Cell(1, 1), seed=-1)


class TestTaskFile:
    TASKS = [
        PlanningTask("a", Cell(0, 1), Cell(5, 6), 60.0, 1),
        PlanningTask("b, with comma", Cell(2, 3), Cell(4, 4), 0.5, 2),
    ]

    def test_format(self):
        text = format_tasks(self.TASKS[:1])
        assert text == (
            "grid_name,start_row,start_col,goal_row,goal_col,budget_s,seed\n"
            "a,0,1,5,6,60.0,1\n"
        )

    def test_save_load(self, tmp_path):
        path = tmp_path / "tasks.csv"
        save_tasks(path, self.TASKS)
        assert load_tasks(path) == self.TASKS

    def test_save_load_many(self, tmp_path):
        rng = np.random.default_rng(11)
        tasks = [
            PlanningTask(
                f"tile_{i}",
                Cell(*map(int, rng.integers(0, 1000, size=2))),
                Cell(*map(int, rng.integers(0, 1000, size=2))),
                float(rng.uniform(0.01, 600.0)),
                int(rng.integers(0, 2**32)),
            )
            for i in range(100)
        ]
        path = tmp_path / "tasks.csv"
        save_tasks(path, tasks)
        assert load_tasks(path) == tasks

    def test_columns_by_header(self):
        text = "seed,grid_name,budget_s,goal_col,goal_row,start_col,start_row\n"
        text += "7,m,1.5,4,3,2,1\n"
        assert parse_tasks(text) == [PlanningTask("m", Cell(1, 2), Cell(3, 4), 1.5, 7)]

    def test_missing_column(self):
        with pytest.raises(FormatError):
            parse_tasks("grid_name,start_row\nm,1\n")

    def test_bad_value_reports_line(self):
        text = format_tasks(self.TASKS) + "c,0,0,1,x,1.0,0\n"
        with pytest.raises(FormatError) as info:
            parse_tasks(text, "tasks.csv")
        assert info.value.line == 4

    def test_wrong_field_count(self):
        text = format_tasks(self.TASKS[:1]) + "c,0,0\n"
        with pytest.raises(FormatError):
            parse_tasks(text)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FormatError):
            load_tasks(tmp_path / "none.csv")
