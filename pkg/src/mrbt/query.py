"""Read-side operations over a built tree.

``prob`` is the per-cell probability ``density / Z`` of the leaf containing a
point; ``region_of(...).normalized_mass`` is the probability of the whole
leaf region. All functions are read-only and may run concurrently with each
other, but not with :meth:`MRBT.insert`.
"""
from __future__ import annotations

from array import array
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from . import kernels
from .errors import EmptyTree, InvalidPoint, SpaceTooLarge, ZeroMass
from .space import Point, Region
from .tree import MRBT

__all__ = [
    "DEFAULT_DENSE_CAP",
    "RegionReport",
    "VisitCounter",
    "draw_max",
    "max_regions",
    "prob",
    "prob_many",
    "region_of",
    "sample",
    "sample_many",
    "to_dense",
]

DEFAULT_DENSE_CAP = 2**24

# draws per block of pre-generated uniforms in sample_many
_SAMPLE_BLOCK = 4096


@dataclass
class VisitCounter:
    """Accumulates node visits for complexity instrumentation."""

    calls: int = 0
    visits: int = 0
    max_visits: int = 0

    def add(self, visits: int, calls: int = 1, most: Optional[int] = None) -> None:
        self.calls += calls
        self.visits += visits
        most = visits if most is None else most
        if most > self.max_visits:
            self.max_visits = most

    @property
    def mean(self) -> float:
        return self.visits / self.calls if self.calls else 0.0


@dataclass(frozen=True)
class RegionReport:
    region: Region
    density: float
    mass: float
    normalized_mass: float


def _require_nonempty(tree: MRBT):
    if tree.node_count == 0:
        raise EmptyTree("the tree has no points yet")


def _locate(tree, p, counter):
    _require_nonempty(tree)
    p = tree.space.validate_point(p)
    leaf, visits = kernels.locate(tree._left, tree._right, tree._dim, tree._split, p)
    if counter is not None:
        counter.add(visits)
    return leaf


def prob(tree: MRBT, p: Sequence[int], counter: Optional[VisitCounter] = None) -> float:
    """Normalized probability of cell ``p``."""
    leaf = _locate(tree, p, counter)
    return tree._density[leaf] / tree.total_mass


def prob_many(tree: MRBT, points, counter: Optional[VisitCounter] = None) -> np.ndarray:
    """Vectorized :func:`prob` for an ``(n, k)`` integer array of valid cells."""
    _require_nonempty(tree)
    pts = np.ascontiguousarray(points, dtype=np.int64)
    if pts.ndim != 2 or pts.shape[1] != tree.space.ndim:
        raise ValueError(f"expected an (n, {tree.space.ndim}) array of cells")
    if pts.size and ((pts < 0).any() or (pts >= np.asarray(tree.space.cardinalities, dtype=np.int64)).any()):
        raise InvalidPoint("some coordinates are outside the space")
    leaves = np.empty(len(pts), dtype=np.int64)
    visits, most = kernels.locate_many(tree._left, tree._right, tree._dim, tree._split, pts, leaves)
    if counter is not None and len(pts):
        counter.add(visits, calls=len(pts), most=most)
    density = np.frombuffer(tree._density, dtype=np.float64)
    return density[leaves] / tree.total_mass


def region_of(tree: MRBT, p: Sequence[int]) -> RegionReport:
    p = tree.space.validate_point(p)
    _require_nonempty(tree)
    lo = array("q", bytes(8 * tree.space.ndim))
    hi = array("q", tree.space.cardinalities)
    path = array("q", bytes(8 * len(tree._path)))
    leaf, _ = kernels.descend(tree._left, tree._right, tree._dim, tree._split, p, lo, hi, path)
    region = Region(tuple(lo), tuple(hi))
    density = tree._density[leaf]
    mass = tree._mass[leaf]
    return RegionReport(region, density, mass, mass / tree.total_mass)


def sample_many(tree: MRBT, n: int, rng: np.random.Generator, counter: Optional[VisitCounter] = None) -> np.ndarray:
    """Draw ``n`` cells with probability ``prob(cell)``; returns an ``(n, k)`` array.

    Each draw consumes a row of ``depth + k`` uniforms: one per tree level for
    the branch choice (low child when ``u < low.mass / node.mass``) and one per
    dimension to pick the cell inside the leaf.
    """
    _require_nonempty(tree)
    if not tree.total_mass > 0.0:
        raise ZeroMass("the tree has zero total mass")
    k = tree.space.ndim
    out = np.empty((n, k), dtype=np.int64)
    width = tree.depth + k
    cards = np.array(tree.space.cardinalities, dtype=np.int64)
    for start in range(0, n, _SAMPLE_BLOCK):
        stop = min(n, start + _SAMPLE_BLOCK)
        u = rng.random((stop - start, width))
        visits, most = kernels.sample_into(
            tree._left, tree._right, tree._dim, tree._split, tree._mass, cards, u, out[start:stop]
        )
        if counter is not None:
            counter.add(visits, calls=stop - start, most=most)
    return out


def sample(tree: MRBT, rng: np.random.Generator, counter: Optional[VisitCounter] = None) -> Point:
    return tuple(sample_many(tree, 1, rng, counter)[0].tolist())


def max_regions(tree: MRBT) -> List[RegionReport]:
    """All leaves at the maximum density, sorted by lower corner."""
    _require_nonempty(tree)
    z = tree.total_mass
    reports = []
    for node, region in tree.max_leaf_regions():
        mass = tree._mass[node]
        reports.append(RegionReport(region, tree._density[node], mass, mass / z))
    reports.sort(key=lambda r: (r.region.lo, r.region.hi))
    return reports


def draw_max(tree: MRBT, rng: np.random.Generator) -> Point:
    """Uniformly random cell among all maximum-density cells."""
    regions = [r.region for r in max_regions(tree)]
    volumes = np.array([float(r.volume) for r in regions])
    cum = np.cumsum(volumes)
    i = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
    region = regions[min(i, len(regions) - 1)]
    u = rng.random(len(region.lo))
    cell = []
    for a, b, x in zip(region.lo, region.hi, u.tolist()):
        c = a + int(x * (b - a))
        cell.append(c if c < b else b - 1)
    return tuple(cell)


def to_dense(tree: MRBT, cap: int = DEFAULT_DENSE_CAP) -> np.ndarray:
    """Row-major array of every cell's probability."""
    total = tree.space.total_cells
    if total > cap:
        raise SpaceTooLarge(f"dense table needs {total} cells ({_pow2(total)}), cap is {cap}")
    _require_nonempty(tree)
    z = tree.total_mass
    dense = np.empty(tree.space.cardinalities, dtype=np.float64)
    for leaf in tree.iter_leaves():
        dense[tuple(slice(a, b) for a, b in zip(leaf.region.lo, leaf.region.hi))] = leaf.density / z
    return dense.reshape(-1)


def _pow2(n: int) -> str:
    if n & (n - 1) == 0:
        return f"2^{n.bit_length() - 1}"
    return f"~2^{n.bit_length() - 1}"
