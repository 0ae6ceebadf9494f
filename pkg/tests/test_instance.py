import json

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import all_orders, cycle_cost, instances
from tspqaoa.instance import (
    InstanceError,
    TspInstance,
    generate_random,
    make_tour,
    normalize,
    read_instance,
    tour_cost,
    write_instance,
)


def test_generate_respects_range():
    inst = generate_random(4, 7, 1, 20)
    off = inst.weights[~np.eye(4, dtype=bool)]
    assert np.all((off >= 1) & (off <= 20))
    assert np.all(off == np.round(off))
    assert np.all(np.diag(inst.weights) == 0)


def test_generate_degenerate_range():
    inst = generate_random(3, 11, 5, 5)
    off = inst.weights[~np.eye(3, dtype=bool)]
    assert np.all(off == 5)


def test_generate_is_deterministic():
    assert generate_random(5, 42) == generate_random(5, 42)
    assert generate_random(5, 42) != generate_random(5, 43)


def test_generate_covers_both_endpoints():
    vals = np.concatenate([generate_random(6, s, 1, 20).weights.ravel() for s in range(50)])
    assert {1.0, 20.0} <= set(vals)


@pytest.mark.parametrize("n", [0, 1, 2])
def test_rejects_small_n(n):
    with pytest.raises(InstanceError):
        generate_random(n, 0)


@pytest.mark.parametrize("lo,hi", [(0, 5), (6, 5)])
def test_rejects_bad_range(lo, hi):
    with pytest.raises(InstanceError):
        generate_random(4, 0, lo, hi)


def test_instance_validation():
    with pytest.raises(InstanceError):
        TspInstance(3, np.array([[0, 1, -1], [1, 0, 1], [1, 1, 0]]))
    with pytest.raises(InstanceError):
        TspInstance(3, np.ones((3, 3)))
    with pytest.raises(InstanceError):
        TspInstance(3, np.zeros((3, 4)))


def test_weights_are_read_only():
    inst = generate_random(4, 0)
    with pytest.raises(ValueError):
        inst.weights[0, 1] = 3


def test_normalize_scale():
    w = np.full((4, 4), 3.0)
    w[1, 2] = 20
    np.fill_diagonal(w, 0)
    ninst = normalize(TspInstance(4, w))
    assert ninst.scale == 80


def test_normalize_uniform_weights():
    w = np.full((5, 5), 7.0)
    np.fill_diagonal(w, 0)
    ninst = normalize(TspInstance(5, w))
    off = ninst.weights[~np.eye(5, dtype=bool)]
    assert np.allclose(off, 1 / 5, rtol=0, atol=1e-15)


def test_normalize_rejects_zero_matrix():
    with pytest.raises(InstanceError):
        normalize(TspInstance(3, np.zeros((3, 3))))


@settings(max_examples=50, deadline=None)
@given(instances(sizes=(3, 4, 5, 6), integer=False))
def test_normalized_tours_at_most_one(inst):
    ninst = normalize(inst)
    costs = [cycle_cost(ninst.weights, o) for o in all_orders(inst.n)]
    assert 0 < max(costs) <= 1
    assert np.allclose(ninst.weights * ninst.scale, inst.weights, rtol=1e-12, atol=0)


def test_tour_cost_uniform():
    w = np.ones((3, 3))
    np.fill_diagonal(w, 0)
    inst = TspInstance(3, w)
    assert tour_cost(inst, (0, 1, 2)) == 3
    assert tour_cost(inst, (2, 0, 1)) == 3


def test_tour_cost_unrolled(inst4):
    w = inst4.weights
    assert tour_cost(inst4, (0, 1, 2, 3)) == w[0, 1] + w[1, 2] + w[2, 3] + w[3, 0]


@settings(max_examples=50, deadline=None)
@given(instances(sizes=(3, 4, 5, 6)))
def test_tour_cost_cyclic_shift_invariant(inst):
    order = tuple(np.random.default_rng(inst.n).permutation(inst.n))
    base = tour_cost(inst, order)
    for s in range(inst.n):
        assert tour_cost(inst, order[s:] + order[:s]) == base


def test_tour_cost_rejects_non_permutation(inst4):
    with pytest.raises(InstanceError):
        tour_cost(inst4, (0, 1, 1, 3))
    with pytest.raises(InstanceError):
        tour_cost(inst4, (0, 1, 2))


def test_make_tour_requires_start(inst4):
    with pytest.raises(InstanceError):
        make_tour(inst4, (1, 0, 2, 3))
    t = make_tour(normalize(inst4), (0, 2, 1, 3))
    assert t.cost == tour_cost(inst4, (0, 2, 1, 3))


def test_round_trip(tmp_path):
    inst = generate_random(5, 3)
    path = tmp_path / "inst.json"
    write_instance(inst, path)
    assert read_instance(path) == inst
    doc = json.loads(path.read_text())
    assert set(doc) == {"n", "weights"} and doc["n"] == 5


def test_round_trip_real_weights(tmp_path):
    w = np.array([[0, 0.1, 2.5], [1 / 3, 0, 7], [4, 1e-7, 0]])
    path = tmp_path / "inst.json"
    write_instance(TspInstance(3, w), path)
    assert read_instance(path) == TspInstance(3, w)


@pytest.mark.parametrize(
    "doc",
    [
        {"n": 3, "weights": [[0, 1, -2], [1, 0, 1], [1, 1, 0]]},
        {"n": 3, "weights": [[0, 1], [1, 0], [1, 1]]},
        {"n": 3, "weights": [[0, 1, 1], [1, 0, 1]]},
        {"n": 3, "weights": [[0, 1, 1], [1, 0, 1], [1, "x", 0]]},
        {"n": 3},
        {"n": "3", "weights": []},
    ],
)
def test_read_rejects_malformed(tmp_path, doc):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(InstanceError):
        read_instance(path)


def test_read_rejects_non_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("n = 3")
    with pytest.raises(InstanceError):
        read_instance(path)
