import math

import numpy as np
import pytest

from _support import all_cells, check_invariants, empirical, flat, random_scenario, scenario_tree, tv
from mrbt import query
from mrbt.errors import EmptyTree, InvalidPoint, SpaceTooLarge
from mrbt.oracle import RegionList
from mrbt.space import Region, SpaceDescriptor
from mrbt.tree import MRBT


@pytest.fixture
def oracle_dense():
    rl = RegionList(SpaceDescriptor.parse("4,4"))
    for p, w in [((0, 0), 0.5), ((3, 3), 1.0), ((2, 0), 2.0), ((3, 2), 0.8)]:
        rl.insert(p, w)
    return rl.dense()


def single_leaf_tree():
    tree = MRBT("4,4")
    tree.insert((1, 2), 0.5)
    return tree


def test_prob_examples(scenario, oracle_dense):
    assert query.prob(scenario, (2, 0)) == pytest.approx(oracle_dense[8], rel=1e-12)
    assert query.prob(scenario, (2, 0)) == pytest.approx(2.0 / 15.8, rel=1e-12)
    assert query.prob(scenario, (2, 2)) == pytest.approx(1.0 / 15.8, rel=1e-12)
    for cell in all_cells(single_leaf_tree().space):
        assert query.prob(single_leaf_tree(), cell) == 0.0625


def test_prob_errors(scenario):
    with pytest.raises(EmptyTree):
        query.prob(MRBT("4,4"), (0, 0))
    with pytest.raises(InvalidPoint):
        query.prob(scenario, (9, 9))


def test_prob_sums_to_one_and_matches_density(scenario):
    z = scenario.total_mass
    total = 0.0
    for cell in all_cells(scenario.space):
        pr = query.prob(scenario, cell)
        total += pr
        assert pr * z == pytest.approx(query.region_of(scenario, cell).density, rel=1e-12)
    assert abs(total - 1.0) <= 1e-9


def test_region_of_examples(scenario):
    r = query.region_of(scenario, (0, 0))
    assert (r.region, r.density, r.mass) == (Region((0, 0), (2, 4)), 0.5, 4.0)
    assert r.normalized_mass == pytest.approx(4 / 15.8, rel=1e-12)
    r = query.region_of(scenario, (3, 3))
    assert (r.region, r.region.volume, r.mass) == (Region((3, 3), (4, 4)), 1, 1.0)
    r = query.region_of(single_leaf_tree(), (3, 0))
    assert r.region == Region((0, 0), (4, 4))
    assert r.normalized_mass == 1.0


def test_prob_many_matches_prob(scenario):
    cells = np.array(all_cells(scenario.space))
    counter = query.VisitCounter()
    got = query.prob_many(scenario, cells, counter)
    assert got.tolist() == [query.prob(scenario, tuple(c)) for c in cells.tolist()]
    assert counter.max_visits <= scenario.depth + 1
    with pytest.raises(InvalidPoint):
        query.prob_many(scenario, np.array([[4, 0]]))


def test_to_dense(scenario, oracle_dense):
    dense = query.to_dense(scenario)
    assert dense.shape == (16,)
    assert abs(dense.sum() - 1.0) <= 1e-9
    assert dense[8] == pytest.approx(0.126582, abs=1e-6)
    np.testing.assert_allclose(dense, oracle_dense, rtol=1e-12, atol=0)
    assert (query.to_dense(single_leaf_tree()) == 1 / 16).all()


def test_to_dense_refuses_huge_space():
    tree = MRBT(SpaceDescriptor.binary(32))
    tree.insert((0,) * 32, 1.0)
    with pytest.raises(SpaceTooLarge, match=r"2\^32"):
        query.to_dense(tree)
    with pytest.raises(EmptyTree):
        query.to_dense(MRBT("4,4"))


def test_sample_single_leaf_uniform():
    tree = single_leaf_tree()
    draws = query.sample_many(tree, 100_000, np.random.default_rng(0))
    assert tv(empirical(flat(tree.space, draws), 16), np.full(16, 1 / 16)) <= 0.02


def test_sample_scenario_law(scenario):
    counter = query.VisitCounter()
    draws = query.sample_many(scenario, 100_000, np.random.default_rng(42), counter)
    assert tv(empirical(flat(scenario.space, draws), 16), query.to_dense(scenario)) <= 0.02
    assert counter.max_visits <= scenario.depth + 1


def test_sample_deterministic(scenario):
    a = query.sample_many(scenario, 1000, np.random.default_rng(7))
    b = query.sample_many(scenario, 1000, np.random.default_rng(7))
    assert (a == b).all()
    assert query.sample(scenario, np.random.default_rng(3)) == query.sample(scenario, np.random.default_rng(3))


def test_sample_empty():
    with pytest.raises(EmptyTree):
        query.sample(MRBT("2"), np.random.default_rng(0))


def test_max_regions(scenario):
    regions = query.max_regions(scenario)
    assert [(r.region, r.density) for r in regions] == [(Region((2, 0), (4, 2)), 2.0)]
    dense = query.to_dense(scenario)
    argmax = {i for i in range(16) if dense[i] == dense.max()}
    assert argmax == set(flat(scenario.space, list(regions[0].region.cells())).tolist())
    rng = np.random.default_rng(5)
    for _ in range(200):
        assert query.draw_max(scenario, rng) in {(2, 0), (3, 0), (2, 1), (3, 1)}
    whole = query.max_regions(single_leaf_tree())
    assert [r.region for r in whole] == [Region((0, 0), (4, 4))]
    with pytest.raises(EmptyTree):
        query.max_regions(MRBT("2"))


def two_max_regions_tree():
    # [0,3) density 1 (inherited), [3,4) density 1, [4,6) density 0.5
    tree = MRBT("6")
    tree.insert((0,), 1.0)
    tree.insert((5,), 0.5)
    tree.insert((3,), 1.0)
    return tree


def test_draw_max_volume_weighted():
    tree = two_max_regions_tree()
    vols = sorted(r.region.volume for r in query.max_regions(tree))
    assert vols == [1, 3]
    rng = np.random.default_rng(11)
    hits = sum(query.draw_max(tree, rng)[0] < 3 for _ in range(100_000))
    assert abs(hits / 100_000 - 0.75) <= 0.02


@pytest.mark.parametrize("seed", range(25))
def test_argmax_agrees_with_dense(seed):
    space, inserts = random_scenario(seed)
    tree = MRBT(space)
    for p, w in inserts:
        tree.insert(p, w)
    check_invariants(tree)
    dense = query.to_dense(tree)
    argmax = set(np.flatnonzero(dense == dense.max()).tolist())
    cells = set()
    for r in query.max_regions(tree):
        cells |= set(flat(space, list(r.region.cells())).tolist())
    assert argmax == cells
    rng = np.random.default_rng(seed)
    for _ in range(20):
        assert int(flat(space, [query.draw_max(tree, rng)])[0]) in cells


def test_prob_visit_bound_exhaustive(scenario):
    counter = query.VisitCounter()
    for cell in all_cells(scenario.space):
        query.prob(scenario, cell, counter)
    assert counter.max_visits <= scenario.depth + 1
    assert counter.calls == 16
    assert math.isclose(counter.mean, counter.visits / 16)
