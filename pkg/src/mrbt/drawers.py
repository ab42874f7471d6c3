"""Point-drawing processes that feed tree construction.

Every drawer returns an iterator of :class:`~mrbt.tree.WeightedPoint`; streams
are single-consumer.
"""
from __future__ import annotations

from typing import Callable, Iterator, TextIO

import numpy as np

from .errors import SpaceTooLarge, UnnormalizedInput
from .oracle import cdf_sample_many, check_normalized
from .space import Point, SpaceDescriptor, index_cell
from .tree import WeightedPoint

__all__ = ["csv_stream", "exhaustive_sweep", "monte_carlo", "uniform_stream"]

DEFAULT_SWEEP_CAP = 2**24


def exhaustive_sweep(
    space: SpaceDescriptor, weight_fn: Callable[[Point], float], cap: int = DEFAULT_SWEEP_CAP
) -> Iterator[WeightedPoint]:
    """Every cell once, in row-major order, weighted by ``weight_fn``."""
    if space.total_cells > cap:
        raise SpaceTooLarge(f"sweep over {space.total_cells} cells exceeds cap {cap}")
    return _sweep(space, weight_fn)


def _sweep(space, weight_fn):
    for i in range(space.total_cells):
        p = index_cell(space, i)
        yield WeightedPoint(p, weight_fn(p))


def monte_carlo(space: SpaceDescriptor, target, n: int, rng: np.random.Generator) -> Iterator[WeightedPoint]:
    """``n`` i.i.d. cells from a dense ``target`` table.

    Each point carries ``target[cell] * total_cells`` as its weight; repeated
    cells are emitted as-is and left for the tree to ignore.
    """
    target = check_normalized(target)
    if target.size != space.total_cells:
        raise UnnormalizedInput(f"target has {target.size} entries, space has {space.total_cells} cells")
    cells = cdf_sample_many(target, n, rng)
    scale = float(space.total_cells)
    return (WeightedPoint(index_cell(space, int(c)), target[c] * scale) for c in cells.tolist())


def uniform_stream(space: SpaceDescriptor, n: int, rng: np.random.Generator) -> Iterator[WeightedPoint]:
    """Monte-Carlo draws from the uniform target without materializing it.

    Matches ``monte_carlo`` weighting: every point has weight 1.
    """
    cards = np.array(space.cardinalities, dtype=np.int64)
    coords = rng.integers(0, cards, size=(n, space.ndim))
    return (WeightedPoint(tuple(row), 1.0) for row in coords.tolist())


def csv_stream(reader: TextIO, space: SpaceDescriptor) -> Iterator[WeightedPoint]:
    """Parse a points CSV lazily, in file order. See :func:`mrbt.io.parse_points_csv`."""
    from .io import parse_points_line

    for lineno, line in enumerate(reader, start=1):
        wp = parse_points_line(line, lineno, space)
        if wp is not None:
            yield wp
