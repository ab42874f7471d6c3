"""Pure-Python tree kernels.

Reference twin of ``_ckernels.pyx``; both expose the same functions with the
same semantics so either can back :mod:`mrbt.kernels`. Node columns are
``array.array`` buffers ('q' for integers, 'd' for reals). A node is a leaf
when ``left[node] < 0``; node 0 is the root.
"""


def in_range(coords, cards):
    """True when ``coords`` is a tuple of plain ints with ``0 <= coords[i] < cards[i]``."""
    return (
        type(coords) is tuple
        and len(coords) == len(cards)
        and all(type(c) is int and 0 <= c < n for c, n in zip(coords, cards))
    )


def locate(left, right, dim, split, coords):
    """Return ``(leaf, visits)`` for the leaf whose region contains ``coords``."""
    node = 0
    visits = 1
    child = left[0]
    while child >= 0:
        if coords[dim[node]] < split[node]:
            node = child
        else:
            node = right[node]
        visits += 1
        child = left[node]
    return node, visits


def descend(left, right, dim, split, coords, lo, hi, path):
    """Walk to the leaf containing ``coords``, narrowing ``lo``/``hi`` in place.

    ``lo`` and ``hi`` must hold the root region on entry. Internal nodes on the
    way down are written to ``path``. Returns ``(leaf, depth)``.
    """
    node = 0
    depth = 0
    child = left[0]
    while child >= 0:
        path[depth] = node
        depth += 1
        d = dim[node]
        s = split[node]
        if coords[d] < s:
            hi[d] = s
            node = child
        else:
            lo[d] = s
            node = right[node]
        child = left[node]
    return node, depth


def update_masses(path, depth, left, right, mass):
    for i in range(depth - 1, -1, -1):
        node = path[i]
        mass[node] = mass[left[node]] + mass[right[node]]


def locate_many(left, right, dim, split, points, out):
    """Batch :func:`locate`; fills ``out`` with leaf ids.

    Returns ``(total_visits, max_visits)``.
    """
    total = 0
    most = 0
    leaves = []
    for coords in points.tolist():
        leaf, visits = locate(left, right, dim, split, coords)
        leaves.append(leaf)
        total += visits
        if visits > most:
            most = visits
    out[:] = leaves
    return total, most


def sample_into(left, right, dim, split, mass, cards, uniforms, out):
    """Mass-proportional descent, one row of ``uniforms`` per draw.

    Column ``j < levels`` drives the branch choice at level ``j``; the last
    ``k`` columns pick the cell inside the reached leaf, one per dimension.
    Returns ``(total_visits, max_visits)`` over all draws.
    """
    k = len(cards)
    levels = uniforms.shape[1] - k
    cards = [int(c) for c in cards]
    total = 0
    most = 0
    rows = []
    for u in uniforms.tolist():
        lo = [0] * k
        hi = list(cards)
        node = 0
        j = 0
        child = left[0]
        while child >= 0:
            d = dim[node]
            if u[j] < mass[child] / mass[node]:
                hi[d] = split[node]
                node = child
            else:
                lo[d] = split[node]
                node = right[node]
            j += 1
            child = left[node]
        total += j + 1
        if j + 1 > most:
            most = j + 1
        cell = []
        for d in range(k):
            c = lo[d] + int(u[levels + d] * (hi[d] - lo[d]))
            cell.append(c if c < hi[d] else hi[d] - 1)
        rows.append(cell)
    out[:] = rows
    return total, most


def cdf_scan(dense, uniforms, out):
    """Linear cumulative-sum scan per uniform draw; returns total cells visited.

    A draw that rounding pushes past the final partial sum takes the last cell
    with non-zero probability.
    """
    values = dense.tolist()
    n = len(values)
    last = n - 1
    while last > 0 and values[last] <= 0.0:
        last -= 1
    total = 0
    picks = []
    for u in uniforms.tolist():
        acc = 0.0
        pick = last
        seen = n
        for i in range(n):
            acc += values[i]
            if u < acc:
                pick = i
                seen = i + 1
                break
        total += seen
        picks.append(pick)
    out[:] = picks
    return total
