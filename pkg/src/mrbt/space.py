"""Geometry of a discrete feature space.

A space is a k-dimensional grid of cells. Points are tuples of cell indices
and regions are half-open boxes ``[lo, hi)`` of cells. Splitting is always a
bisection at ``lo + extent // 2`` along a dimension picked by cycling through
the dimensions with the node depth, skipping dimensions that are already one
cell wide.
"""
from __future__ import annotations

import itertools
import math
import operator
from array import array
from dataclasses import dataclass
from typing import Sequence, Tuple

from . import kernels
from .errors import InvalidPoint, InvalidRegion, InvalidSpace, NoSplittableDimension

__all__ = [
    "Point",
    "Region",
    "SpaceDescriptor",
    "bisect",
    "cell_index",
    "contains",
    "index_cell",
    "max_depth",
    "split_dimension",
    "volume",
]

Point = Tuple[int, ...]

# total_cells must fit in an unsigned 64-bit integer; coordinates in a signed one
MAX_TOTAL_CELLS = 2**64 - 1
MAX_CARDINALITY = 2**63 - 1


@dataclass(frozen=True)
class SpaceDescriptor:
    cardinalities: Tuple[int, ...]

    def __post_init__(self):
        cards = tuple(_as_int(c, "cardinality") for c in self.cardinalities)
        if not cards:
            raise InvalidSpace("a space needs at least one dimension")
        for i, c in enumerate(cards):
            if not 1 <= c <= MAX_CARDINALITY:
                raise InvalidSpace(f"cardinality of dimension {i} must be in [1, 2**63 - 1], got {c}")
        total = math.prod(cards)
        if total > MAX_TOTAL_CELLS:
            raise InvalidSpace(f"space has {total} cells, more than 2**64 - 1")
        object.__setattr__(self, "cardinalities", cards)
        object.__setattr__(self, "_total", total)
        object.__setattr__(self, "_card_array", array("q", cards))

    @classmethod
    def parse(cls, text: str) -> "SpaceDescriptor":
        """Build a space from its textual form, e.g. ``"4,4"``."""
        parts = [p.strip() for p in text.strip().split(",")]
        try:
            cards = tuple(int(p) for p in parts)
        except ValueError:
            raise InvalidSpace(f"bad space descriptor {text!r}: expected comma-separated integers") from None
        return cls(cards)

    @classmethod
    def binary(cls, k: int) -> "SpaceDescriptor":
        return cls((2,) * k)

    def __str__(self):
        return ",".join(str(c) for c in self.cardinalities)

    @property
    def ndim(self) -> int:
        return len(self.cardinalities)

    @property
    def total_cells(self) -> int:
        return self._total

    @property
    def full_region(self) -> "Region":
        return Region((0,) * self.ndim, self.cardinalities)

    def validate_point(self, coords: Sequence[int]) -> Point:
        """Return ``coords`` as a tuple of ints, raising InvalidPoint if out of range."""
        # fast path: an in-range tuple of plain ints is returned as is
        if kernels.in_range(coords, self._card_array):
            return coords
        try:
            p = tuple(operator.index(c) for c in coords)
        except TypeError:
            raise InvalidPoint(f"coordinates must be integers, got {coords!r}") from None
        if len(p) != len(self.cardinalities):
            raise InvalidPoint(f"expected {len(self.cardinalities)} coordinates, got {len(p)}")
        for i, (c, n) in enumerate(zip(p, self.cardinalities)):
            if not 0 <= c < n:
                raise InvalidPoint(f"coordinate {i} = {c} outside [0, {n})")
        return p

    def check_region(self, region: "Region") -> None:
        if len(region.lo) != self.ndim:
            raise InvalidRegion(f"region has {len(region.lo)} dimensions, space has {self.ndim}")
        for i, (h, n) in enumerate(zip(region.hi, self.cardinalities)):
            if h > n:
                raise InvalidRegion(f"upper bound {h} of dimension {i} exceeds cardinality {n}")


@dataclass(frozen=True)
class Region:
    """Half-open box of cells: ``lo[i] <= x[i] < hi[i]``."""

    lo: Tuple[int, ...]
    hi: Tuple[int, ...]

    def __post_init__(self):
        lo = tuple(_as_int(v, "bound") for v in self.lo)
        hi = tuple(_as_int(v, "bound") for v in self.hi)
        if len(lo) != len(hi) or not lo:
            raise InvalidRegion("lo and hi must have the same, non-zero length")
        for i, (a, b) in enumerate(zip(lo, hi)):
            if not 0 <= a < b:
                raise InvalidRegion(f"dimension {i}: need 0 <= lo < hi, got [{a}, {b})")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __str__(self):
        return "x".join(f"[{a},{b})" for a, b in zip(self.lo, self.hi))

    @property
    def volume(self) -> int:
        return volume(self)

    def cells(self):
        """Iterate over the cells of the region in row-major order."""
        return itertools.product(*(range(a, b) for a, b in zip(self.lo, self.hi)))


def _as_int(value, what):
    if isinstance(value, bool):
        raise InvalidSpace(f"{what} must be an integer, got {value!r}")
    try:
        return operator.index(value)
    except TypeError:
        raise InvalidSpace(f"{what} must be an integer, got {value!r}") from None


def volume(region: Region) -> int:
    return math.prod(b - a for a, b in zip(region.lo, region.hi))


def contains(region: Region, p: Sequence[int]) -> bool:
    return all(a <= c < b for a, c, b in zip(region.lo, p, region.hi))


def split_dimension(region: Region, depth: int) -> int:
    """First dimension with extent >= 2, scanning cyclically from ``depth % k``."""
    d = pick_dimension(region.lo, region.hi, depth)
    if d < 0:
        raise NoSplittableDimension(f"region {region} is a single cell")
    return d


def pick_dimension(lo: Sequence[int], hi: Sequence[int], depth: int) -> int:
    """:func:`split_dimension` on raw bounds; returns -1 for a single cell."""
    k = len(lo)
    start = depth % k
    for off in range(k):
        d = start + off
        if d >= k:
            d -= k
        if hi[d] - lo[d] >= 2:
            return d
    return -1


def bisect(region: Region, dim: int) -> Tuple[int, Region, Region]:
    """Split ``region`` in two along ``dim``.

    Returns ``(split_index, low, high)`` where ``low`` covers
    ``[lo[dim], split_index)`` and ``high`` covers ``[split_index, hi[dim])``.
    """
    a, b = region.lo[dim], region.hi[dim]
    if b - a < 2:
        raise NoSplittableDimension(f"dimension {dim} of region {region} has extent {b - a}")
    s = a + (b - a) // 2
    low = Region(region.lo, region.hi[:dim] + (s,) + region.hi[dim + 1 :])
    high = Region(region.lo[:dim] + (s,) + region.lo[dim + 1 :], region.hi)
    return s, low, high


def cell_index(space: SpaceDescriptor, p: Sequence[int]) -> int:
    """Row-major flat index of ``p``, dimension 0 varying slowest."""
    p = space.validate_point(p)
    idx = 0
    for c, n in zip(p, space.cardinalities):
        idx = idx * n + c
    return idx


def index_cell(space: SpaceDescriptor, index: int) -> Point:
    index = operator.index(index)
    if not 0 <= index < space.total_cells:
        raise InvalidPoint(f"cell index {index} outside [0, {space.total_cells})")
    coords = []
    for n in reversed(space.cardinalities):
        index, c = divmod(index, n)
        coords.append(c)
    return tuple(reversed(coords))


def max_depth(space: SpaceDescriptor) -> int:
    """Upper bound on tree depth: sum of ceil(log2(cardinality))."""
    return sum((n - 1).bit_length() for n in space.cardinalities)
