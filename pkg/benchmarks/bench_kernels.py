"""Time the compiled and pure-Python kernels on the same trees.

Usage: python benchmarks/bench_kernels.py [--points N] [--repeat R]

Each kernel is called directly with identical inputs on both backends; the
outputs are cross-checked before timings are reported.
"""
import argparse
import time

import numpy as np

from mrbt import MRBT, SpaceDescriptor, kernels, query
from mrbt.drawers import monte_carlo, uniform_stream
from mrbt.bench import bimodal_target


def best_of(repeat, fn):
    times = []
    result = None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return min(times), result


def workloads(points, rng):
    space = SpaceDescriptor.binary(32)
    tree = MRBT(space)
    tree.extend(uniform_stream(space, points, rng))
    yield "32 binary dims, uniform", tree

    space = SpaceDescriptor.parse("64,64")
    tree = MRBT(space)
    tree.extend(monte_carlo(space, bimodal_target(space), points, rng))
    yield "64x64, bimodal", tree


def bench_tree(name, tree, backends, calls, repeat):
    rng = np.random.default_rng(1)
    k = tree.space.ndim
    cards = np.array(tree.space.cardinalities, dtype=np.int64)
    pts = rng.integers(0, cards, size=(calls, k)).astype(np.int64)
    tuples = [tuple(p) for p in pts.tolist()]
    uniforms = rng.random((calls, tree.depth + k))
    cols = (tree._left, tree._right, tree._dim, tree._split)

    print(f"\n{name}: nodes={tree.node_count} depth={tree.depth} calls={calls}")
    print(f"  {'kernel':<14}" + "".join(f"{b:>14}" for b in backends) + f"{'speedup':>10}")
    rows = {}
    for label, run in [
        ("locate", lambda m: [m.locate(*cols, t) for t in tuples]),
        ("locate_many", lambda m: (m.locate_many(*cols, pts, out := np.empty(calls, np.int64)), out.copy())),
        ("sample_into", lambda m: (m.sample_into(*cols, tree._mass, cards, uniforms,
                                                 out := np.empty((calls, k), np.int64)), out.copy())),
    ]:
        results = {}
        for bname, mod in backends.items():
            secs, res = best_of(repeat, lambda: run(mod))
            rows.setdefault(label, {})[bname] = secs / calls
            results[bname] = res
        first = next(iter(results.values()))
        for res in results.values():
            assert repr(res) == repr(first), f"{label}: backends disagree"
    if tree.space.total_cells <= 2**16:
        dense = query.to_dense(tree)
        v = rng.random(calls // 10)
        for bname, mod in backends.items():
            secs, _ = best_of(repeat, lambda: mod.cdf_scan(dense, v, np.empty(len(v), np.int64)))
            rows.setdefault("cdf_scan", {})[bname] = secs / len(v)

    for label, per in rows.items():
        line = f"  {label:<14}" + "".join(f"{per[b] * 1e9:>11.0f} ns" for b in backends)
        if "cython" in per:
            line += f"{per['python'] / per['cython']:>9.1f}x"
        print(line)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--points", type=int, default=2000, help="draws used to build each tree")
    parser.add_argument("--calls", type=int, default=20_000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    backends = kernels.available_backends()
    print(f"active backend: {kernels.BACKEND}; available: {', '.join(backends)}")
    if "cython" not in backends:
        print("compiled backend not built; reporting Python timings only")
    rng = np.random.default_rng(0)
    for name, tree in workloads(args.points, rng):
        bench_tree(name, tree, backends, args.calls, args.repeat)


if __name__ == "__main__":
    main()
