import json

import numpy as np
import pytest

from districter import (ConfigError, InstanceError, Plan,
                        generate_grid_instance, load_instance, load_plan,
                        save_instance, save_plan, validate_plan)
from districter.instances import derive_adjacency


def write_grid_file(tmp_path, instance, drop_adjacency=False, schools=None):
    path = tmp_path / "instance.json"
    save_instance(instance, path)
    doc = json.loads(path.read_text())
    if drop_adjacency:
        del doc["adjacency"]
    if schools is not None:
        doc["schools"] = schools
    path.write_text(json.dumps(doc))
    return path


def test_generator_examples():
    inst = generate_grid_instance(3, 3, 2, seed=1)
    assert inst.node_count == 9
    assert inst.territory_count == 2
    assert inst.graph.edge_count == 12

    single = generate_grid_instance(1, 1, 1, seed=0)
    assert single.node_count == 1 and list(single.centers) == [0]

    big = generate_grid_instance(10, 10, 4, seed=0)
    assert big.graph.edge_count == 180

    with pytest.raises(ConfigError):
        generate_grid_instance(2, 2, 5, seed=0)


def test_generator_capacity_matches_population():
    for profile in ("uniform", "clustered"):
        inst = generate_grid_instance(6, 5, 3, seed=9, balance_profile=profile)
        level = inst.level
        assert inst.graph.capacity[level].sum() == inst.graph.population[level].sum()
        assert all(inst.graph.capacity[level][c] > 0 for c in inst.centers)


def test_generator_deterministic_bytes(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    save_instance(generate_grid_instance(5, 4, 3, seed=7, balance_profile="clustered"), a)
    save_instance(generate_grid_instance(5, 4, 3, seed=7, balance_profile="clustered"), b)
    assert a.read_bytes() == b.read_bytes()


def test_load_derives_rook_adjacency(tmp_path):
    inst = generate_grid_instance(3, 3, 2, seed=1, centers=(0, 8))
    path = write_grid_file(tmp_path, inst, drop_adjacency=True)
    loaded = load_instance(path, "es")
    assert loaded.graph.edge_count == 12
    assert np.array_equal(loaded.graph.edges, inst.graph.edges)


def test_derived_adjacency_excludes_corner_touch():
    from districter import unit_square
    # two squares meeting only at a corner
    adj = derive_adjacency([unit_square(0, 0), unit_square(1, 1)])
    assert adj == [[], []]


def test_load_centers_from_capacity(tmp_path):
    inst = generate_grid_instance(3, 3, 2, seed=1, centers=(0, 8))
    path = write_grid_file(tmp_path, inst)
    loaded = load_instance(path, "ES")
    assert list(loaded.centers) == [0, 8]


def test_load_centers_from_schools(tmp_path):
    inst = generate_grid_instance(3, 3, 2, seed=1, centers=(0, 8))
    schools = [
        {"level": "ES", "location": [0.5, 0.5], "capacity": 500},
        {"level": "ES", "location": [2.5, 2.5], "capacity": 400},
        {"level": "MS", "location": [1.5, 1.5], "capacity": 900},
    ]
    path = write_grid_file(tmp_path, inst, schools=schools)
    loaded = load_instance(path, "es")
    assert list(loaded.centers) == [0, 8]
    assert loaded.graph.capacity["ES"][0] == 500
    ms = load_instance(path, "ms")
    assert list(ms.centers) == [4]


def test_load_school_outside_all_units(tmp_path):
    inst = generate_grid_instance(2, 2, 1, seed=0)
    schools = [{"level": "ES", "location": [10.0, 10.0], "capacity": 100}]
    path = write_grid_file(tmp_path, inst, schools=schools)
    with pytest.raises(InstanceError, match="10.0"):
        load_instance(path, "es")


def test_load_duplicate_schools_in_one_unit(tmp_path):
    inst = generate_grid_instance(2, 2, 1, seed=0)
    schools = [
        {"level": "ES", "location": [0.25, 0.25], "capacity": 100},
        {"level": "ES", "location": [0.75, 0.75], "capacity": 100},
    ]
    path = write_grid_file(tmp_path, inst, schools=schools)
    with pytest.raises(InstanceError, match="one school per"):
        load_instance(path, "es")


def test_load_disconnected_graph(tmp_path):
    inst = generate_grid_instance(1, 3, 2, seed=0, centers=(0, 2))
    path = write_grid_file(tmp_path, inst)
    doc = json.loads(path.read_text())
    doc["adjacency"] = [[0, 1]]  # node 2 isolated
    path.write_text(json.dumps(doc))
    with pytest.raises(InstanceError, match="disconnected"):
        load_instance(path, "es")


def test_load_no_centers(tmp_path):
    # generated instances carry identical levels, so blank one out
    inst = generate_grid_instance(2, 2, 1, seed=0)
    path = write_grid_file(tmp_path, inst)
    doc = json.loads(path.read_text())
    for unit in doc["units"]:
        unit["capacity"]["MS"] = 0
    path.write_text(json.dumps(doc))
    with pytest.raises(InstanceError):
        load_instance(path, "ms")


def test_instance_round_trip(tmp_path):
    inst = generate_grid_instance(4, 4, 3, seed=5)
    path = tmp_path / "round.json"
    save_instance(inst, path)
    loaded = load_instance(path, "es")
    assert np.array_equal(loaded.graph.edges, inst.graph.edges)
    assert np.array_equal(loaded.graph.population["ES"],
                          inst.graph.population["ES"])
    assert np.array_equal(loaded.centers, inst.centers)
    assert np.allclose(loaded.distance, inst.distance)


def test_plan_round_trip(tmp_path, grid3):
    plan = Plan(np.array([0, 0, 0, 0, 0, 1, 1, 1, 1]), grid3.centers)
    path = tmp_path / "plan.json"
    save_plan(plan, path)
    loaded = load_plan(path, grid3)
    assert np.array_equal(loaded.assignment, plan.assignment)


def test_plan_load_repairs_disconnected(tmp_path, grid3, caplog):
    # territory 0 = {0, 1, 5}: node 5 is cut off from {0, 1}
    broken = Plan(np.array([0, 0, 1, 1, 1, 0, 1, 1, 1]), grid3.centers)
    path = tmp_path / "broken.json"
    save_plan(broken, path)
    with caplog.at_level("INFO", logger="districter.instances"):
        loaded = load_plan(path, grid3)
    assert validate_plan(loaded, grid3.graph, 1.0).hard_ok
    moved = np.flatnonzero(loaded.assignment != broken.assignment)
    assert list(moved) == [5]
    assert any("reassigned nodes [5]" in rec.getMessage()
               for rec in caplog.records)


def test_plan_load_errors(tmp_path, grid3):
    path = tmp_path / "bad.json"
    save_plan(Plan(np.zeros(4, dtype=np.int64), np.array([0, 3])), path)
    with pytest.raises(InstanceError, match="9"):
        load_plan(path, grid3)

    # center 8 not in its own territory: not repairable
    bad = {"assignment": [0] * 9, "centers": [0, 8]}
    path.write_text(json.dumps(bad))
    with pytest.raises(InstanceError, match="center"):
        load_plan(path, grid3)

    wrong_k = {"assignment": [0] * 9, "centers": [0]}
    path.write_text(json.dumps(wrong_k))
    with pytest.raises(InstanceError, match="centers"):
        load_plan(path, grid3)


def test_generated_centers_pinned_override():
    inst = generate_grid_instance(3, 3, 2, seed=1, centers=(0, 8))
    free = generate_grid_instance(3, 3, 2, seed=1)
    assert list(inst.centers) == [0, 8]
    # pinning centers must not change the population draw
    assert np.array_equal(inst.graph.population["ES"],
                          free.graph.population["ES"])
