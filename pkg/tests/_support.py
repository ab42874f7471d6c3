"""Shared fixtures-by-import: scenarios, invariant checks, statistics."""
import itertools
import math

import numpy as np

from mrbt import MRBT, SpaceDescriptor
from mrbt.space import max_depth

SCENARIO = [((0, 0), 0.5), ((3, 3), 1.0), ((2, 0), 2.0), ((3, 2), 0.8)]


def scenario_tree(**kw):
    tree = MRBT("4,4", **kw)
    for p, w in SCENARIO:
        tree.insert(p, w)
    return tree


def random_scenario(seed, max_inserts=50):
    """Space of 1-3 dims, cardinalities 2-8, weighted inserts with duplicates."""
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 4))
    cards = tuple(int(c) for c in rng.integers(2, 9, size=k))
    space = SpaceDescriptor(cards)
    n = int(rng.integers(1, max_inserts + 1))
    inserts = []
    for _ in range(n):
        if inserts and rng.random() < 0.2:
            p = inserts[int(rng.integers(len(inserts)))][0]
        else:
            p = tuple(int(rng.integers(c)) for c in cards)
        inserts.append((p, float(rng.uniform(0.01, 10.0))))
    return space, inserts


def all_cells(space):
    return list(itertools.product(*(range(c) for c in space.cardinalities)))


def tv(p, q):
    return 0.5 * float(np.abs(np.asarray(p, dtype=float) - np.asarray(q, dtype=float)).sum())


def empirical(flat_indices, size):
    return np.bincount(flat_indices, minlength=size) / len(flat_indices)


def flat(space, cells):
    return np.ravel_multi_index(tuple(np.asarray(cells).T), space.cardinalities)


def rel_close(a, b, tol=1e-12):
    return abs(a - b) <= tol * max(abs(a), abs(b), 1e-300)


def check_invariants(tree):
    """Assert every structural invariant of ``tree`` by full scan."""
    if tree.node_count == 0:
        assert tree.total_mass == 0.0
        return
    space = tree.space
    leaves = tree.leaves()
    assert tree.node_count == 2 * len(leaves) - 1
    assert tree.depth == max(leaf.depth for leaf in leaves)
    assert tree.depth <= max_depth(space)

    if space.total_cells <= 2**16:
        cover = np.zeros(space.cardinalities, dtype=np.int64)
        for leaf in leaves:
            cover[tuple(slice(a, b) for a, b in zip(leaf.region.lo, leaf.region.hi))] += 1
        assert (cover == 1).all(), "leaf regions must partition the space"
    else:
        assert sum(leaf.region.volume for leaf in leaves) == space.total_cells

    for leaf in leaves:
        assert rel_close(tree.mass(leaf.node), leaf.density * leaf.region.volume)
        if leaf.representative is not None:
            assert all(a <= c < b for a, c, b in zip(leaf.region.lo, leaf.representative, leaf.region.hi))
    for node in range(tree.node_count):
        if not tree.is_leaf(node):
            lo, hi = tree.children(node)
            assert rel_close(tree.mass(node), tree.mass(lo) + tree.mass(hi))
    assert rel_close(tree.total_mass, math.fsum(l.density * l.region.volume for l in leaves))

    best = max(leaf.density for leaf in leaves)
    expected = {leaf.node: leaf.region for leaf in leaves if leaf.density == best}
    assert tree.max_density == best
    assert dict(tree.max_leaf_regions()) == expected
