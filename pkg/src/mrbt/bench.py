"""MRBT versus dense probability table: node visits, latency and memory."""
from __future__ import annotations

import time
from typing import Dict, Optional

import numpy as np

from . import kernels, query
from .drawers import monte_carlo, uniform_stream
from .errors import ParseError, SpaceTooLarge
from .oracle import cdf_sample_many, check_normalized
from .space import SpaceDescriptor, cell_index
from .tree import MRBT, DuplicateIgnored, Inserted

__all__ = ["bimodal_target", "load_target", "run_bench", "tv_distance"]


def tv_distance(p, q) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


def bimodal_target(space: SpaceDescriptor) -> np.ndarray:
    """Equal mixture of two separable discretized Gaussians.

    The modes sit at 1/4 and 3/4 of every axis, with a standard deviation of
    a quarter of the axis length (at least half a cell).
    """
    comps = []
    for centre in (0.25, 0.75):
        grid = np.ones(())
        for n in space.cardinalities:
            x = np.arange(n) + 0.5
            sigma = max(n / 4.0, 0.5)
            w = np.exp(-0.5 * ((x - centre * n) / sigma) ** 2)
            grid = np.multiply.outer(grid, w / w.sum())
        comps.append(grid.reshape(-1))
    target = 0.5 * comps[0] + 0.5 * comps[1]
    return target / target.sum()


def load_target(spec: str, space: SpaceDescriptor, cap: int = query.DEFAULT_DENSE_CAP) -> Optional[np.ndarray]:
    """Resolve ``uniform``, ``bimodal`` or a dense-table CSV path.

    Returns ``None`` for a uniform target too large to tabulate; callers then
    draw uniformly without a table.
    """
    fits = space.total_cells <= cap
    if spec == "uniform":
        return np.full(space.total_cells, 1.0 / space.total_cells) if fits else None
    if not fits:
        raise SpaceTooLarge(f"target {spec!r} needs a dense table of {space.total_cells} cells, cap is {cap}")
    if spec == "bimodal":
        return bimodal_target(space)
    with open(spec, encoding="utf-8") as fh:
        return read_dense(fh.read(), space)


def read_dense(text: str, space: SpaceDescriptor) -> np.ndarray:
    """Parse a dense-table CSV (see :mod:`mrbt.io`) into a row-major array."""
    k = space.ndim
    out = np.full(space.total_cells, np.nan)
    lineno = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split(",")
        if len(fields) != k + 1:
            raise ParseError(f"expected {k + 1} fields, got {len(fields)}", lineno)
        try:
            coords = [int(f) for f in fields[:k]]
            p = float(fields[k])
        except ValueError:
            raise ParseError("malformed dense-table row", lineno) from None
        out[cell_index(space, coords)] = p
    if np.isnan(out).any():
        raise ParseError(f"dense table covers only {int((~np.isnan(out)).sum())} of {space.total_cells} cells", lineno)
    return check_normalized(out)


def run_bench(
    space: SpaceDescriptor,
    target: str = "uniform",
    n: int = 1000,
    seed: int = 0,
    queries: int = 10_000,
    timing: bool = True,
) -> Dict[str, object]:
    """Build from Monte-Carlo draws, then compare lookups and sampling.

    Visit counts are exact and seed-deterministic; ``*_ns`` entries are wall
    time per operation and are omitted when ``timing`` is false.
    """
    rng = np.random.default_rng(seed)
    table = load_target(target, space)
    report: Dict[str, object] = {
        "backend": kernels.BACKEND,
        "space": str(space),
        "target": target,
        "points_drawn": n,
    }
    stream = monte_carlo(space, table, n, rng) if table is not None else uniform_stream(space, n, rng)
    tree = MRBT(space)
    t0 = time.perf_counter()
    outcomes = tree.extend(stream)
    build_s = time.perf_counter() - t0
    report["inserted"] = sum(isinstance(o, Inserted) for o in outcomes)
    report["ignored"] = sum(isinstance(o, DuplicateIgnored) for o in outcomes)
    stats = tree.stats()
    report.update(
        node_count=stats.node_count,
        leaf_count=stats.leaf_count,
        depth=stats.depth,
        total_mass=stats.total_mass,
        mrbt_bytes=stats.mrbt_bytes,
        dense_cells=space.total_cells,
        dense_bytes=stats.dense_bytes,
        dense_feasible="yes" if table is not None else "no",
    )
    if timing:
        report["build_ns_per_point"] = round(build_s * 1e9 / n) if n else 0
    if tree.node_count == 0 or queries <= 0:
        return report

    cards = np.array(space.cardinalities, dtype=np.int64)
    points = [tuple(row) for row in rng.integers(0, cards, size=(queries, space.ndim)).tolist()]

    counter = query.VisitCounter()
    t0 = time.perf_counter()
    for p in points:
        query.prob(tree, p, counter)
    prob_s = time.perf_counter() - t0
    report["mrbt_prob_mean_visits"] = round(counter.mean, 4)
    report["mrbt_prob_max_visits"] = counter.max_visits

    counter = query.VisitCounter()
    t0 = time.perf_counter()
    query.sample_many(tree, queries, rng, counter)
    sample_s = time.perf_counter() - t0
    report["mrbt_sample_mean_visits"] = round(counter.mean, 4)
    report["mrbt_sample_max_visits"] = counter.max_visits
    if timing:
        report["mrbt_prob_ns"] = round(prob_s * 1e9 / queries)
        report["mrbt_sample_ns"] = round(sample_s * 1e9 / queries)

    if table is not None:
        dense = query.to_dense(tree)
        report["dense_lookup_visits"] = 1
        t0 = time.perf_counter()
        for p in points:
            dense[cell_index(space, p)]
        lookup_s = time.perf_counter() - t0
        counter = query.VisitCounter()
        t0 = time.perf_counter()
        cdf_sample_many(dense, queries, rng, counter)
        cdf_s = time.perf_counter() - t0
        report["dense_cdf_mean_visits"] = round(counter.mean, 4)
        if timing:
            report["dense_lookup_ns"] = round(lookup_s * 1e9 / queries)
            report["dense_cdf_ns"] = round(cdf_s * 1e9 / queries)
        report["tv_distance"] = round(tv_distance(dense, table), 6)
    return report
