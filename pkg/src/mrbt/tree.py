"""The multi-resolution binary tree.

Nodes live in parallel ``array.array`` columns indexed by node id, root at 0.
A leaf has ``left == -1`` and carries an unnormalized per-cell density plus an
optional representative point (an index into the flat ``_reps`` table). An
internal node carries the split dimension and index; its region is implied by
the path from the root. Every node stores its mass: ``density * volume`` for
a leaf, the sum of its children otherwise, so the root mass is the
normalization constant. Children always have larger ids than their parent.
"""
from __future__ import annotations

import math
import time
from array import array
from dataclasses import dataclass
from typing import Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

from . import kernels
from .errors import NonFiniteWeight, NonPositiveWeight
from .space import Point, Region, SpaceDescriptor, max_depth, pick_dimension

__all__ = [
    "Budget",
    "BudgetExhausted",
    "DuplicateIgnored",
    "Inserted",
    "Leaf",
    "MRBT",
    "NODE_BYTES",
    "StatsReport",
    "WeightedPoint",
    "check_weight",
]

# left, right, dim, split, rep (int64) + density, mass (float64)
NODE_BYTES = 7 * 8


def check_weight(weight) -> float:
    w = float(weight)
    if not math.isfinite(w):
        raise NonFiniteWeight(f"weight must be finite, got {weight!r}")
    if w <= 0.0:
        raise NonPositiveWeight(f"weight must be > 0, got {weight!r}")
    return w


@dataclass(frozen=True)
class WeightedPoint:
    point: Point
    weight: float

    def __post_init__(self):
        object.__setattr__(self, "point", tuple(self.point))
        object.__setattr__(self, "weight", check_weight(self.weight))


@dataclass(frozen=True)
class Inserted:
    splits_performed: int


@dataclass(frozen=True)
class DuplicateIgnored:
    pass


@dataclass(frozen=True)
class BudgetExhausted:
    pass


InsertOutcome = Union[Inserted, DuplicateIgnored, BudgetExhausted]
DUPLICATE = DuplicateIgnored()
EXHAUSTED = BudgetExhausted()


@dataclass
class Budget:
    """Construction limits. ``deadline`` is a :func:`time.monotonic` instant."""

    max_nodes: Optional[int] = None
    max_points: Optional[int] = None
    deadline: Optional[float] = None

    def __post_init__(self):
        for name in ("max_nodes", "max_points"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v}")

    @classmethod
    def with_time_limit(cls, milliseconds: float, **limits) -> "Budget":
        return cls(deadline=time.monotonic() + milliseconds / 1000.0, **limits)


class Leaf(NamedTuple):
    node: int
    region: Region
    density: float
    representative: Optional[Point]
    depth: int


@dataclass(frozen=True)
class StatsReport:
    node_count: int
    leaf_count: int
    depth: int
    inserted_points: int
    total_mass: float
    max_density: float
    mrbt_bytes: int
    dense_bytes: int

    def lines(self) -> List[str]:
        return [
            f"node_count={self.node_count}",
            f"leaf_count={self.leaf_count}",
            f"depth={self.depth}",
            f"inserted_points={self.inserted_points}",
            f"total_mass={self.total_mass!r}",
            f"max_density={self.max_density!r}",
            f"mrbt_bytes={self.mrbt_bytes}",
            f"dense_bytes={self.dense_bytes}",
        ]


class MRBT:
    """Incrementally refined piecewise-constant distribution over a grid.

    Single writer: :meth:`insert` and :meth:`rebuild_masses` must not run
    concurrently with anything else on the same tree. Readers may share it.
    """

    def __init__(self, space: Union[SpaceDescriptor, str], budget: Optional[Budget] = None):
        if isinstance(space, str):
            space = SpaceDescriptor.parse(space)
        self.space = space
        self.budget = budget if budget is not None else Budget()
        self._left = array("q")
        self._right = array("q")
        self._dim = array("q")
        self._split = array("q")
        self._rep = array("q")
        self._density = array("d")
        self._mass = array("d")
        self._reps = array("q")
        self.inserted_points = 0
        self.depth = 0
        self.max_density = 0.0
        self._max = {}
        k = space.ndim
        self._k = k
        self._cards = array("q", space.cardinalities)
        self._lo = array("q", [0] * k)
        self._hi = array("q", space.cardinalities)
        self._path = array("q", [0] * (max_depth(space) + 1))

    # ------------------------------------------------------------------ basic

    @property
    def node_count(self) -> int:
        return len(self._left)

    @property
    def leaf_count(self) -> int:
        return (len(self._left) + 1) // 2

    @property
    def total_mass(self) -> float:
        """Root mass, the normalization constant Z (0.0 for an empty tree)."""
        return self._mass[0] if self._left else 0.0

    def __len__(self):
        return len(self._left)

    def is_leaf(self, node: int) -> bool:
        return self._left[node] < 0

    def children(self, node: int) -> Tuple[int, int]:
        return self._left[node], self._right[node]

    def split_of(self, node: int) -> Tuple[int, int]:
        return self._dim[node], self._split[node]

    def density(self, node: int) -> float:
        return self._density[node]

    def mass(self, node: int) -> float:
        return self._mass[node]

    def representative(self, node: int) -> Optional[Point]:
        r = self._rep[node]
        if r < 0:
            return None
        k = self._k
        return tuple(self._reps[r * k : (r + 1) * k])

    def set_budget(self, budget: Budget) -> None:
        if budget.max_nodes is not None and budget.max_nodes < self.node_count:
            raise ValueError(f"max_nodes {budget.max_nodes} below current node count {self.node_count}")
        if budget.max_points is not None and budget.max_points < self.inserted_points:
            raise ValueError(f"max_points {budget.max_points} below current point count {self.inserted_points}")
        self.budget = budget

    # -------------------------------------------------------------- insertion

    def _append(self, density, rep, mass):
        self._left.append(-1)
        self._right.append(-1)
        self._dim.append(-1)
        self._split.append(-1)
        self._rep.append(rep)
        self._density.append(density)
        self._mass.append(mass)
        return len(self._left) - 1

    def _store_rep(self, point) -> int:
        self._reps.extend(point)
        return len(self._reps) // self._k - 1

    def _budget_blocks(self) -> bool:
        b = self.budget
        if b.max_points is not None and self.inserted_points >= b.max_points:
            return True
        if b.max_nodes is not None and len(self._left) >= b.max_nodes:
            return True
        return b.deadline is not None and time.monotonic() >= b.deadline

    def insert(self, point: Sequence[int], weight: float) -> InsertOutcome:
        """Insert a drawn point with unnormalized probability ``weight``.

        Returns :class:`Inserted`, ``DUPLICATE`` when ``point`` already
        represents its leaf, or ``EXHAUSTED`` when the budget forbids the
        insertion. Neither of the latter two touches the tree.
        """
        point = self.space.validate_point(point)
        weight = check_weight(weight)
        if self._budget_blocks():
            return EXHAUSTED
        if not self._left:
            self._append(weight, self._store_rep(point), weight * float(self.space.total_cells))
            self.inserted_points += 1
            self.depth = 0
            self.max_density = weight
            self._max = {0: self.space.full_region}
            return Inserted(0)

        lo, hi = self._lo, self._hi
        for d in range(self._k):
            lo[d] = 0
            hi[d] = self._cards[d]
        leaf, depth = kernels.descend(self._left, self._right, self._dim, self._split, point, lo, hi, self._path)
        lo = lo.tolist()
        hi = hi.tolist()
        rep = self._rep[leaf]
        rep_point = self.representative(leaf)
        if rep_point == point:
            return DUPLICATE

        # plan the split chain first so the budget can refuse before mutating
        plan = []
        if rep_point is not None:
            clo, chi = lo[:], hi[:]
            level = depth
            while True:
                d = pick_dimension(clo, chi, level)
                s = clo[d] + (chi[d] - clo[d]) // 2
                point_high = point[d] >= s
                rep_high = rep_point[d] >= s
                plan.append((d, s, point_high, rep_high))
                if point_high != rep_high:
                    break
                if point_high:
                    clo[d] = s
                else:
                    chi[d] = s
                level += 1
        else:
            d = pick_dimension(lo, hi, depth)
            if d >= 0:
                s = lo[d] + (hi[d] - lo[d]) // 2
                plan.append((d, s, point[d] >= s, None))
        max_nodes = self.budget.max_nodes
        if max_nodes is not None and len(self._left) + 2 * len(plan) > max_nodes:
            return EXHAUSTED

        old_density = self._density[leaf]
        self._max.pop(leaf, None)
        new_leaves = []
        if not plan:
            # single cell without representative: overwrite
            self._density[leaf] = weight
            self._rep[leaf] = self._store_rep(point)
            self._mass[leaf] = weight
            new_leaves.append((leaf, weight, lo, hi))
            chain = []
        else:
            new_rep = self._store_rep(point)
            chain = []
            node = leaf
            last = len(plan) - 1
            for step, (d, s, point_high, rep_high) in enumerate(plan):
                low_hi = hi[:]
                low_hi[d] = s
                high_lo = lo[:]
                high_lo[d] = s
                if rep_high is None:
                    point_leaf = (weight, new_rep)
                    other_leaf = (old_density, -1)
                elif step == last:
                    point_leaf = (weight, new_rep)
                    other_leaf = (old_density, rep)
                else:
                    point_leaf = None
                    other_leaf = (old_density, -1)
                low_spec, high_spec = (other_leaf, point_leaf) if point_high else (point_leaf, other_leaf)
                low_id = self._make_child(low_spec, lo, low_hi, new_leaves)
                high_id = self._make_child(high_spec, high_lo, hi, new_leaves)
                self._left[node] = low_id
                self._right[node] = high_id
                self._dim[node] = d
                self._split[node] = s
                self._rep[node] = -1
                self._density[node] = 0.0
                chain.append(node)
                if point_high:
                    node, lo = high_id, high_lo
                else:
                    node, hi = low_id, low_hi

        mass, left, right = self._mass, self._left, self._right
        for node in reversed(chain):
            mass[node] = mass[left[node]] + mass[right[node]]
        kernels.update_masses(self._path, depth, left, right, mass)
        self.inserted_points += 1
        if depth + len(plan) > self.depth:
            self.depth = depth + len(plan)

        for node, dens, nlo, nhi in new_leaves:
            if dens > self.max_density:
                self.max_density = dens
                self._max = {node: Region(tuple(nlo), tuple(nhi))}
            elif dens == self.max_density:
                self._max[node] = Region(tuple(nlo), tuple(nhi))
        if not self._max:
            self._rescan_max()
        return Inserted(len(plan))

    def _make_child(self, spec, lo, hi, new_leaves):
        if spec is None:
            # placeholder that becomes internal on the next chain step
            return self._append(0.0, -1, 0.0)
        density, rep = spec
        vol = 1
        for a, b in zip(lo, hi):
            vol *= b - a
        node = self._append(density, rep, density * float(vol))
        new_leaves.append((node, density, lo, hi))
        return node

    def extend(self, points) -> List[InsertOutcome]:
        """Insert an iterable of :class:`WeightedPoint`, returning every outcome."""
        return [self.insert(wp.point, wp.weight) for wp in points]

    # ------------------------------------------------------------- traversal

    def iter_leaves(self) -> Iterator[Leaf]:
        """Depth-first, low child first."""
        if not self._left:
            return
        stack = [(0, tuple(0 for _ in range(self._k)), self.space.cardinalities, 0)]
        while stack:
            node, lo, hi, depth = stack.pop()
            if self._left[node] < 0:
                yield Leaf(node, Region(lo, hi), self._density[node], self.representative(node), depth)
                continue
            d, s = self._dim[node], self._split[node]
            stack.append((self._right[node], lo[:d] + (s,) + lo[d + 1 :], hi, depth + 1))
            stack.append((self._left[node], lo, hi[:d] + (s,) + hi[d + 1 :], depth + 1))

    def leaves(self) -> List[Leaf]:
        return list(self.iter_leaves())

    def max_leaf_regions(self) -> List[Tuple[int, Region]]:
        """Tracked max-density leaves as ``(node, region)``, no traversal."""
        return list(self._max.items())

    def _rescan_max(self):
        best = 0.0
        found = {}
        for leaf in self.iter_leaves():
            if leaf.density > best:
                best = leaf.density
                found = {leaf.node: leaf.region}
            elif leaf.density == best:
                found[leaf.node] = leaf.region
        self.max_density = best
        self._max = found

    def rebuild_masses(self) -> None:
        """Recompute every mass bottom-up, the depth, and the max-density list."""
        if not self._left:
            self.depth = 0
            self.max_density = 0.0
            self._max = {}
            return
        mass, left, right = self._mass, self._left, self._right
        depth = 0
        for leaf in self.iter_leaves():
            mass[leaf.node] = leaf.density * float(leaf.region.volume)
            depth = max(depth, leaf.depth)
        for node in range(len(left) - 1, -1, -1):
            if left[node] >= 0:
                mass[node] = mass[left[node]] + mass[right[node]]
        self.depth = depth
        # loaded trees may split off-centre; keep the descent buffer large enough
        need = depth + max_depth(self.space) + 1
        if len(self._path) < need:
            self._path = array("q", [0] * need)
        self._rescan_max()

    # ------------------------------------------------------------- reporting

    def stats(self) -> StatsReport:
        n = len(self._left)
        return StatsReport(
            node_count=n,
            leaf_count=(n + 1) // 2,
            depth=self.depth,
            inserted_points=self.inserted_points,
            total_mass=self.total_mass,
            max_density=self.max_density,
            mrbt_bytes=n * NODE_BYTES,
            dense_bytes=self.space.total_cells * 8,
        )

    # ------------------------------------------------------ structural build

    def _add_internal(self, dim: int, split: int) -> int:
        node = self._append(0.0, -1, 0.0)
        self._dim[node] = dim
        self._split[node] = split
        return node

    def _add_leaf(self, density: float, representative: Optional[Point]) -> int:
        rep = -1 if representative is None else self._store_rep(representative)
        return self._append(density, rep, 0.0)

    def _link(self, node: int, low: int, high: int) -> None:
        self._left[node] = low
        self._right[node] = high

