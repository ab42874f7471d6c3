# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled tree kernels; same contract as ``_pykernels``.

The per-call kernels (``in_range``, ``locate``, ``descend``, ``update_masses``)
take ``array.array`` buffers and read them through raw pointers; acquiring
memoryviews on every call would cost more than the descent itself. The batch
kernels take memoryviews, whose setup is amortized over the batch.
"""
from cpython cimport array
from cpython.long cimport PyLong_CheckExact


def in_range(coords, array.array cards):
    cdef const long long* C = cards.data.as_longlongs
    cdef Py_ssize_t i, n
    cdef long long v
    if type(coords) is not tuple:
        return False
    n = len(<tuple>coords)
    if n != len(cards):
        return False
    for i in range(n):
        c = (<tuple>coords)[i]
        if not PyLong_CheckExact(c):
            return False
        try:
            v = c
        except OverflowError:
            return False
        if v < 0 or v >= C[i]:
            return False
    return True


def locate(array.array left, array.array right, array.array dim, array.array split, tuple coords):
    cdef const long long* L = left.data.as_longlongs
    cdef const long long* R = right.data.as_longlongs
    cdef const long long* D = dim.data.as_longlongs
    cdef const long long* S = split.data.as_longlongs
    cdef Py_ssize_t node = 0
    cdef long long visits = 1
    cdef long long child = L[0]
    while child >= 0:
        if <long long>coords[D[node]] < S[node]:
            node = child
        else:
            node = R[node]
        visits += 1
        child = L[node]
    return node, visits


def descend(array.array left, array.array right, array.array dim, array.array split, tuple coords,
            array.array lo, array.array hi, array.array path):
    cdef const long long* L = left.data.as_longlongs
    cdef const long long* R = right.data.as_longlongs
    cdef const long long* D = dim.data.as_longlongs
    cdef const long long* S = split.data.as_longlongs
    cdef long long* lo_ = lo.data.as_longlongs
    cdef long long* hi_ = hi.data.as_longlongs
    cdef long long* P = path.data.as_longlongs
    cdef Py_ssize_t node = 0
    cdef Py_ssize_t depth = 0
    cdef long long child = L[0]
    cdef long long d, s
    while child >= 0:
        P[depth] = node
        depth += 1
        d = D[node]
        s = S[node]
        if <long long>coords[d] < s:
            hi_[d] = s
            node = child
        else:
            lo_[d] = s
            node = R[node]
        child = L[node]
    return node, depth


def update_masses(array.array path, Py_ssize_t depth,
                  array.array left, array.array right, array.array mass):
    cdef const long long* P = path.data.as_longlongs
    cdef const long long* L = left.data.as_longlongs
    cdef const long long* R = right.data.as_longlongs
    cdef double* M = mass.data.as_doubles
    cdef Py_ssize_t i, node
    for i in range(depth - 1, -1, -1):
        node = P[i]
        M[node] = M[L[node]] + M[R[node]]


def locate_many(const long long[:] left, const long long[:] right,
                const long long[:] dim, const long long[:] split,
                const long long[:, :] points, long long[:] out):
    cdef Py_ssize_t i, node
    cdef long long child, visits
    cdef long long total = 0, most = 0
    for i in range(points.shape[0]):
        node = 0
        visits = 1
        child = left[0]
        while child >= 0:
            if points[i, dim[node]] < split[node]:
                node = child
            else:
                node = right[node]
            visits += 1
            child = left[node]
        out[i] = node
        total += visits
        if visits > most:
            most = visits
    return total, most


def sample_into(const long long[:] left, const long long[:] right,
                const long long[:] dim, const long long[:] split,
                const double[:] mass, const long long[:] cards,
                const double[:, :] uniforms, long long[:, :] out):
    cdef Py_ssize_t k = cards.shape[0]
    cdef Py_ssize_t levels = uniforms.shape[1] - k
    cdef Py_ssize_t i, j, d, node
    cdef long long child, c
    cdef long long total = 0, most = 0
    cdef long long[:] lo = cards.copy()
    cdef long long[:] hi = cards.copy()
    for i in range(uniforms.shape[0]):
        for d in range(k):
            lo[d] = 0
            hi[d] = cards[d]
        node = 0
        j = 0
        child = left[0]
        while child >= 0:
            d = dim[node]
            if uniforms[i, j] < mass[child] / mass[node]:
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
        for d in range(k):
            c = lo[d] + <long long>(uniforms[i, levels + d] * <double>(hi[d] - lo[d]))
            out[i, d] = c if c < hi[d] else hi[d] - 1
    return total, most


def cdf_scan(const double[:] dense, const double[:] uniforms, long long[:] out):
    cdef Py_ssize_t n = dense.shape[0]
    cdef Py_ssize_t i, t, pick, seen
    cdef double acc, u
    cdef long long total = 0
    cdef Py_ssize_t last = n - 1
    while last > 0 and dense[last] <= 0.0:
        last -= 1
    for t in range(uniforms.shape[0]):
        u = uniforms[t]
        acc = 0.0
        pick = last
        seen = n
        for i in range(n):
            acc += dense[i]
            if u < acc:
                pick = i
                seen = i + 1
                break
        total += seen
        out[t] = pick
    return total
