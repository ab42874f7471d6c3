"""Text formats: point CSV, tree documents, dense tables.

Points CSV
    One row per point: ``k`` integer coordinates then a positive weight,
    comma separated. Blank lines and lines starting with ``#`` are skipped.

Tree document (version 1)
    JSON object ``{"root": NODE | null, "space": [c0, ...], "version": 1}``.
    ``NODE`` is ``{"kind": "internal", "dim": d, "split": s, "low": NODE,
    "high": NODE}`` or ``{"kind": "leaf", "density": x, "rep": [..]}`` with
    ``rep`` omitted for leaves without a representative. Keys are sorted, no
    whitespace, floats in shortest round-trip form, one trailing newline.
    Masses are not stored; they are rebuilt on load.

Dense table
    One ``c0,...,c{k-1},probability`` row per cell in row-major order,
    probabilities with 17 significant digits.
"""
from __future__ import annotations

import json
import math
from typing import List, Optional

import numpy as np

from .errors import (
    ArityMismatch,
    InvalidPoint,
    InvalidSpace,
    NonFiniteWeight,
    NonPositiveWeight,
    ParseError,
    SchemaError,
    VersionMismatch,
)
from .space import SpaceDescriptor, index_cell
from .tree import MRBT, WeightedPoint

__all__ = [
    "FORMAT_VERSION",
    "deserialize_tree",
    "parse_points_csv",
    "parse_points_line",
    "serialize_tree",
    "write_dense",
]

FORMAT_VERSION = 1


# ---------------------------------------------------------------- points CSV


def parse_points_line(line: str, lineno: int, space: SpaceDescriptor) -> Optional[WeightedPoint]:
    text = line.strip()
    if not text or text.startswith("#"):
        return None
    fields = text.split(",")
    k = space.ndim
    if len(fields) != k + 1:
        raise ArityMismatch(f"expected {k + 1} fields ({k} coordinates and a weight), got {len(fields)}", lineno)
    coords = []
    for col, field in enumerate(fields[:k], start=1):
        try:
            coords.append(int(field.strip()))
        except ValueError:
            raise ParseError(f"coordinate {field.strip()!r} is not an integer", lineno, col) from None
    try:
        weight = float(fields[k].strip())
    except ValueError:
        raise ParseError(f"weight {fields[k].strip()!r} is not a number", lineno, k + 1) from None
    try:
        point = space.validate_point(coords)
    except InvalidPoint as exc:
        raise InvalidPoint(str(exc), line=lineno) from None
    if not math.isfinite(weight):
        raise NonFiniteWeight(f"line {lineno}: weight must be finite, got {fields[k].strip()}")
    if weight <= 0.0:
        raise NonPositiveWeight(f"line {lineno}: weight must be > 0, got {fields[k].strip()}")
    return WeightedPoint(point, weight)


def parse_points_csv(text: str, space: SpaceDescriptor) -> List[WeightedPoint]:
    points = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        wp = parse_points_line(line, lineno, space)
        if wp is not None:
            points.append(wp)
    return points


# -------------------------------------------------------------- dense tables


def write_dense(dense, space: SpaceDescriptor) -> str:
    arr = np.asarray(dense, dtype=np.float64).reshape(-1)
    if arr.size != space.total_cells:
        raise ValueError(f"dense table has {arr.size} entries, space has {space.total_cells} cells")
    rows = []
    for i, p in enumerate(arr.tolist()):
        coords = ",".join(str(c) for c in index_cell(space, i))
        rows.append(f"{coords},{p:.17g}\n")
    return "".join(rows)


# ------------------------------------------------------------ tree documents


def serialize_tree(tree: MRBT) -> str:
    root = None
    if tree.node_count:
        records = {}
        # children have larger ids than parents, so a reverse sweep sees them first
        for node in range(tree.node_count - 1, -1, -1):
            if tree.is_leaf(node):
                rec = {"kind": "leaf", "density": tree.density(node)}
                rep = tree.representative(node)
                if rep is not None:
                    rec["rep"] = list(rep)
            else:
                low, high = tree.children(node)
                dim, split = tree.split_of(node)
                rec = {"kind": "internal", "dim": dim, "split": split, "low": records.pop(low), "high": records.pop(high)}
            records[node] = rec
        root = records[0]
    doc = {"version": FORMAT_VERSION, "space": list(tree.space.cardinalities), "root": root}
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), allow_nan=False) + "\n"


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def _expect_keys(rec, required, optional, path):
    if not isinstance(rec, dict):
        raise SchemaError("expected an object", path)
    missing = [k for k in required if k not in rec]
    if missing:
        raise SchemaError(f"missing key(s) {', '.join(missing)}", path)
    extra = sorted(set(rec) - set(required) - set(optional))
    if extra:
        raise SchemaError(f"unexpected key(s) {', '.join(extra)}", path)


def deserialize_tree(text: str) -> MRBT:
    """Load a tree document; masses, depth and the max list are rebuilt."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON ({exc.msg} at line {exc.lineno}, column {exc.colno})", "$") from None
    if not isinstance(doc, dict):
        raise SchemaError("expected an object", "$")
    if "version" not in doc:
        raise SchemaError("missing key version", "$")
    if doc["version"] != FORMAT_VERSION:
        raise VersionMismatch(f"unsupported document version {doc['version']!r}, expected {FORMAT_VERSION}")
    _expect_keys(doc, ("version", "space", "root"), (), "$")
    cards = doc["space"]
    if not isinstance(cards, list) or not all(_is_int(c) for c in cards):
        raise SchemaError("expected a list of integers", "space")
    try:
        space = SpaceDescriptor(tuple(cards))
    except InvalidSpace as exc:
        raise SchemaError(str(exc), "space") from None
    tree = MRBT(space)
    if doc["root"] is None:
        return tree

    k = space.ndim
    stack = [(doc["root"], "root", (0,) * k, space.cardinalities, -1, None)]
    while stack:
        rec, path, lo, hi, parent, side = stack.pop()
        if not isinstance(rec, dict) or rec.get("kind") not in ("leaf", "internal"):
            raise SchemaError('expected a node object with kind "leaf" or "internal"', path)
        if rec["kind"] == "leaf":
            _expect_keys(rec, ("kind", "density"), ("rep",), path)
            density = rec["density"]
            if isinstance(density, bool) or not isinstance(density, (int, float)) or not math.isfinite(density) or density < 0:
                raise SchemaError("density must be a finite non-negative number", f"{path}.density")
            rep = rec.get("rep")
            if rep is not None:
                if not isinstance(rep, list) or len(rep) != k or not all(_is_int(c) for c in rep):
                    raise SchemaError(f"rep must be a list of {k} integers", f"{path}.rep")
                if not all(a <= c < b for a, c, b in zip(lo, rep, hi)):
                    region = "x".join(f"[{a},{b})" for a, b in zip(lo, hi))
                    raise InvalidPoint(f"representative {tuple(rep)} lies outside its region {region}", path=f"{path}.rep")
                rep = tuple(rep)
            node = tree._add_leaf(float(density), rep)
        else:
            _expect_keys(rec, ("kind", "dim", "split", "low", "high"), (), path)
            dim, split = rec["dim"], rec["split"]
            if not _is_int(dim) or not 0 <= dim < k:
                raise SchemaError(f"dim must be an integer in [0, {k})", f"{path}.dim")
            if not _is_int(split) or not lo[dim] < split < hi[dim]:
                raise SchemaError(f"split must be an integer strictly inside ({lo[dim]}, {hi[dim]})", f"{path}.split")
            node = tree._add_internal(dim, split)
            stack.append((rec["high"], f"{path}.high", lo[:dim] + (split,) + lo[dim + 1 :], hi, node, "high"))
            stack.append((rec["low"], f"{path}.low", lo, hi[:dim] + (split,) + hi[dim + 1 :], node, "low"))
        if parent >= 0:
            low, high = tree.children(parent)
            if side == "low":
                tree._link(parent, node, high)
            else:
                tree._link(parent, low, node)
    tree.rebuild_masses()
    if not tree.total_mass > 0.0:
        raise SchemaError("tree has zero total mass", "root")
    tree.inserted_points = sum(1 for leaf in tree.iter_leaves() if leaf.representative is not None)
    return tree
