"""Command-line front end.

Exit codes: 0 success (including a build stopped by its budget), 1 runtime
error, 2 usage error. Diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import io, query
from .bench import run_bench
from .drawers import csv_stream
from .errors import InvalidSpace, MRBTError
from .space import SpaceDescriptor
from .tree import MRBT, Budget, BudgetExhausted, DuplicateIgnored


def _space(text):
    try:
        return SpaceDescriptor.parse(text)
    except InvalidSpace as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _coords(text):
    try:
        return tuple(int(c) for c in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad coordinates {text!r}: expected comma-separated integers") from None


def _positive(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _count(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    return v


def _load(path):
    with open(path, encoding="utf-8") as fh:
        return io.deserialize_tree(fh.read())


def _write_text(path, text):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def cmd_build(args, out):
    limits = {"max_nodes": args.max_nodes, "max_points": args.max_points}
    if args.time_limit_ms is not None:
        budget = Budget(deadline=time.monotonic() + args.time_limit_ms / 1000.0, **limits)
    else:
        budget = Budget(**limits)
    tree = MRBT(args.space, budget)
    inserted = ignored = 0
    stopped = False
    fh = sys.stdin if args.input == "-" else open(args.input, encoding="utf-8")
    try:
        for wp in csv_stream(fh, args.space):
            outcome = tree.insert(wp.point, wp.weight)
            if isinstance(outcome, BudgetExhausted):
                stopped = True
                break
            if isinstance(outcome, DuplicateIgnored):
                ignored += 1
            else:
                inserted += 1
    finally:
        if fh is not sys.stdin:
            fh.close()
    _write_text(args.out, io.serialize_tree(tree))
    summary = (
        f"inserted={inserted} ignored={ignored} budget_stopped={'yes' if stopped else 'no'} "
        f"total_mass={tree.total_mass!r} nodes={tree.node_count} depth={tree.depth}"
    )
    if stopped:
        summary += " note=budget-exhausted"
    print(summary, file=out if args.out != "-" else sys.stderr)


def cmd_query(args, out):
    tree = _load(args.tree)
    p = args.point
    pr = query.prob(tree, p)
    rep = query.region_of(tree, p)
    print(f"prob={pr!r}", file=out)
    print(f"region={rep.region}", file=out)
    print(f"density={rep.density!r}", file=out)
    print(f"mass={rep.mass!r}", file=out)
    print(f"normalized_mass={rep.normalized_mass!r}", file=out)
    print(f"total_mass={tree.total_mass!r}", file=out)


def cmd_sample(args, out):
    tree = _load(args.tree)
    rng = np.random.default_rng(args.seed)
    for row in query.sample_many(tree, args.n, rng).tolist():
        print(",".join(str(c) for c in row), file=out)


def cmd_argmax(args, out):
    tree = _load(args.tree)
    for r in query.max_regions(tree):
        print(f"region={r.region} density={r.density!r} mass={r.mass!r} normalized_mass={r.normalized_mass!r}", file=out)
    if args.draw:
        cell = query.draw_max(tree, np.random.default_rng(args.seed))
        print("draw=" + ",".join(str(c) for c in cell), file=out)


def cmd_stats(args, out):
    tree = _load(args.tree)
    stats = tree.stats()
    for line in stats.lines():
        print(line, file=out)
    cells = tree.space.total_cells
    print(f"dense_cells={cells}", file=out)
    ratio = stats.dense_bytes / stats.mrbt_bytes if stats.mrbt_bytes else float("inf")
    print(f"dense_to_mrbt_bytes_ratio={ratio:.6g}", file=out)


def cmd_export_dense(args, out):
    tree = _load(args.tree)
    dense = query.to_dense(tree, cap=args.cap)
    _write_text(args.out, io.write_dense(dense, tree.space))


def cmd_bench(args, out):
    report = run_bench(args.space, args.target, args.n, args.seed, queries=args.queries, timing=not args.no_timing)
    for key, value in report.items():
        print(f"{key}={value!r}" if isinstance(value, float) else f"{key}={value}", file=out)


def build_parser():
    parser = argparse.ArgumentParser(prog="mrbt", description="Multi-resolution binary tree distributions")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("build", help="build a tree from a points CSV")
    p.add_argument("--space", type=_space, required=True, help='cardinalities, e.g. "4,4"')
    p.add_argument("--input", required=True, help="points CSV, or - for stdin")
    p.add_argument("--out", required=True, help="tree document to write, or - for stdout")
    p.add_argument("--max-nodes", type=_positive)
    p.add_argument("--max-points", type=_positive)
    p.add_argument("--time-limit-ms", type=_count)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("query", help="probability and region of one cell")
    p.add_argument("--tree", required=True)
    p.add_argument("--point", type=_coords, required=True)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("sample", help="draw cells from the tree")
    p.add_argument("--tree", required=True)
    p.add_argument("-n", type=_count, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("argmax", help="maximum-probability regions")
    p.add_argument("--tree", required=True)
    p.add_argument("--draw", action="store_true", help="also draw one maximum-probability cell")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_argmax)

    p = sub.add_parser("stats", help="size report, MRBT versus dense table")
    p.add_argument("--tree", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("export-dense", help="write the normalized dense table")
    p.add_argument("--tree", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--cap", type=_positive, default=query.DEFAULT_DENSE_CAP, help="largest table allowed (cells)")
    p.set_defaults(func=cmd_export_dense)

    p = sub.add_parser("bench", help="compare MRBT and dense-table operations")
    p.add_argument("--space", type=_space, required=True)
    p.add_argument("--target", default="uniform", help="uniform, bimodal, or a dense-table CSV")
    p.add_argument("-n", type=_count, default=1000, help="Monte-Carlo draws used to build the tree")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--queries", type=_count, default=10_000)
    p.add_argument("--no-timing", action="store_true", help="omit wall-clock figures (byte-stable output)")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None, out=None):
    args = build_parser().parse_args(argv)
    out = sys.stdout if out is None else out
    try:
        args.func(args, out)
    except (MRBTError, OSError) as exc:
        print(f"mrbt {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
