import pytest

from districter import (ConfigError, generate_grid_instance, objective_value,
                        validate_plan)
from districter.oracle import enumerate_feasible_plans, exhaustive_optimum


def test_path_has_two_feasible_plans(path3):
    plans = list(enumerate_feasible_plans(path3))
    assert len(plans) == 2
    assert sorted(tuple(p.assignment) for p in plans) \
        == [(0, 0, 1), (0, 1, 1)]


def test_all_centers_single_plan():
    inst = generate_grid_instance(2, 2, 4, seed=0)
    result = exhaustive_optimum(inst)
    assert result.feasible_count == 1
    assert result.best_j == objective_value(result.best_plan, inst)


def test_enumerated_plans_are_feasible_and_optimal(grid3):
    plans = list(enumerate_feasible_plans(grid3))
    assert len(plans) == 30
    js = []
    for p in plans:
        assert validate_plan(p, grid3.graph, 1.0).hard_ok
        js.append(objective_value(p, grid3))
    result = exhaustive_optimum(grid3)
    assert result.best_j == min(js)


def test_size_guard():
    inst = generate_grid_instance(5, 4, 2, seed=0)  # 20 nodes
    with pytest.raises(ConfigError):
        list(enumerate_feasible_plans(inst))


def test_state_count_guard():
    inst = generate_grid_instance(4, 4, 8, seed=0)  # 8^8 = 1.6e7 > bound
    with pytest.raises(ConfigError):
        list(enumerate_feasible_plans(inst))
