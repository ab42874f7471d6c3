"""Brute-force reference for the tree.

:class:`RegionList` keeps the leaf set as a flat list and applies the same
insertion rules by linear scan, using only :mod:`mrbt.space`. It shares no code
with :mod:`mrbt.tree`, so agreement between the two is a real cross-check.
``cdf_sample`` is the dense-table baseline sampler.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from . import kernels
from .errors import EmptyTree, SpaceTooLarge, UnnormalizedInput
from .space import Point, Region, SpaceDescriptor, bisect, cell_index, contains, split_dimension, volume
from .tree import DUPLICATE, EXHAUSTED, Inserted, check_weight

__all__ = ["Entry", "RegionList", "cdf_sample", "cdf_sample_many", "check_normalized"]


@dataclass
class Entry:
    region: Region
    density: float
    representative: Optional[Point]
    depth: int


class RegionList:
    def __init__(self, space: SpaceDescriptor, max_nodes: Optional[int] = None, max_points: Optional[int] = None):
        if isinstance(space, str):
            space = SpaceDescriptor.parse(space)
        self.space = space
        self.entries: List[Entry] = []
        self.max_nodes = max_nodes
        self.max_points = max_points
        self.inserted_points = 0

    @property
    def node_count(self) -> int:
        return 2 * len(self.entries) - 1 if self.entries else 0

    @property
    def total_mass(self) -> float:
        return sum(e.density * volume(e.region) for e in self.entries)

    def insert(self, point: Sequence[int], weight: float):
        point = self.space.validate_point(point)
        weight = check_weight(weight)
        if self.max_points is not None and self.inserted_points >= self.max_points:
            return EXHAUSTED
        if self.max_nodes is not None and self.node_count >= self.max_nodes:
            return EXHAUSTED
        if not self.entries:
            self.entries.append(Entry(self.space.full_region, weight, point, 0))
            self.inserted_points += 1
            return Inserted(0)

        hits = [i for i, e in enumerate(self.entries) if contains(e.region, point)]
        assert len(hits) == 1, "regions must partition the space"
        i = hits[0]
        entry = self.entries[i]
        if entry.representative == point:
            return DUPLICATE

        replacement = []
        if entry.representative is None:
            if volume(entry.region) == 1:
                replacement.append(Entry(entry.region, weight, point, entry.depth))
            else:
                d = split_dimension(entry.region, entry.depth)
                _, low, high = bisect(entry.region, d)
                for half in (low, high):
                    if contains(half, point):
                        replacement.append(Entry(half, weight, point, entry.depth + 1))
                    else:
                        replacement.append(Entry(half, entry.density, None, entry.depth + 1))
        else:
            region, depth = entry.region, entry.depth
            while True:
                d = split_dimension(region, depth)
                _, low, high = bisect(region, d)
                depth += 1
                p_low = contains(low, point)
                r_low = contains(low, entry.representative)
                if p_low != r_low:
                    for half, has_point in ((low, p_low), (high, not p_low)):
                        if has_point:
                            replacement.append(Entry(half, weight, point, depth))
                        else:
                            replacement.append(Entry(half, entry.density, entry.representative, depth))
                    break
                shared, empty = (low, high) if p_low else (high, low)
                replacement.append(Entry(empty, entry.density, None, depth))
                region = shared

        splits = len(replacement) - 1
        if self.max_nodes is not None and self.node_count + 2 * splits > self.max_nodes:
            return EXHAUSTED
        self.entries[i : i + 1] = replacement
        self.inserted_points += 1
        return Inserted(splits)

    def dense(self, cap: int = 2**24) -> np.ndarray:
        """Per-cell density / Z in row-major order."""
        total = self.space.total_cells
        if total > cap:
            raise SpaceTooLarge(f"dense table needs {total} cells, cap is {cap}")
        if not self.entries:
            raise EmptyTree("no entries")
        z = self.total_mass
        out = np.full(total, np.nan)
        for e in self.entries:
            for cell in e.region.cells():
                out[cell_index(self.space, cell)] = e.density / z
        return out


def check_normalized(dense, tol: float = 1e-9) -> np.ndarray:
    arr = np.asarray(dense, dtype=np.float64).reshape(-1)
    if arr.size == 0 or not np.all(np.isfinite(arr)) or (arr < 0).any():
        raise UnnormalizedInput("probabilities must be finite and non-negative")
    s = math.fsum(arr.tolist())
    if abs(s - 1.0) > tol:
        raise UnnormalizedInput(f"probabilities sum to {s!r}, not 1")
    return np.ascontiguousarray(arr)


def cdf_sample_many(dense, n: int, rng: np.random.Generator, counter=None) -> np.ndarray:
    """Draw ``n`` flat cell indices by linear scan of the cumulative sum."""
    arr = check_normalized(dense)
    out = np.empty(n, dtype=np.int64)
    u = rng.random(n)
    visits = kernels.cdf_scan(arr, u, out)
    if counter is not None and n:
        counter.add(visits, calls=n, most=int(out.max()) + 1)
    return out


def cdf_sample(dense, rng: np.random.Generator, counter=None) -> int:
    return int(cdf_sample_many(dense, 1, rng, counter)[0])
