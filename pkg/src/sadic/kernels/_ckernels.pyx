# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops.  Same signatures and results as _pykernels."""
import numpy as np
cimport numpy as cnp
from libc.math cimport log, fabs, floor

cnp.import_array()


cdef inline double _vnorm(double* v, int d) noexcept nogil:
    cdef double m = 0.0
    cdef int i
    for i in range(d):
        if fabs(v[i]) > m:
            m = fabs(v[i])
    return m


def vec_log_growth(const long long[:] idx, const double[:, :, ::1] mats,
                   const double[:] v0, long burn=0):
    """Sum of log sup-norm growth of v <- A_{idx[k]} v for k >= burn."""
    cdef Py_ssize_t n = idx.shape[0], k
    cdef int d = mats.shape[1], i, j
    cdef double v[16]
    cdef double w[16]
    cdef double s, nrm, total = 0.0
    if d > 16:
        raise ValueError("dimension too large")
    for i in range(d):
        v[i] = v0[i]
    nrm = _vnorm(v, d)
    for i in range(d):
        v[i] /= nrm
    with nogil:
        for k in range(n):
            for i in range(d):
                s = 0.0
                for j in range(d):
                    s += mats[idx[k], i, j] * v[j]
                w[i] = s
            nrm = _vnorm(w, d)
            if nrm == 0.0:
                with gil:
                    raise FloatingPointError("carried vector collapsed to zero")
            for i in range(d):
                v[i] = w[i] / nrm
            if k >= burn:
                total += log(nrm)
    return total


def mat_log_growth(const long long[:] idx, const double[:, :, ::1] mats,
                   bint right, long burn=0):
    """Sum of log growth (max row-sum norm) of P <- P A (right) or A P (left)."""
    cdef Py_ssize_t n = idx.shape[0], k
    cdef int d = mats.shape[1], i, j, l
    cdef double P[256]
    cdef double Q[256]
    cdef double s, nrm, rs, total = 0.0
    if d > 16:
        raise ValueError("dimension too large")
    for i in range(d * d):
        P[i] = 0.0
    for i in range(d):
        P[i * d + i] = 1.0
    with nogil:
        for k in range(n):
            for i in range(d):
                for j in range(d):
                    s = 0.0
                    if right:
                        for l in range(d):
                            s += P[i * d + l] * mats[idx[k], l, j]
                    else:
                        for l in range(d):
                            s += mats[idx[k], i, l] * P[l * d + j]
                    Q[i * d + j] = s
            nrm = 0.0
            for i in range(d):
                rs = 0.0
                for j in range(d):
                    rs += fabs(Q[i * d + j])
                if rs > nrm:
                    nrm = rs
            for i in range(d * d):
                P[i] = Q[i] / nrm
            if k >= burn:
                total += log(nrm)
    return total


def brun_digits(double x1, double x2, long n):
    """Brun branch digits of (x1, x2); stops early when x2 == 0.
    Returns (digits int8 array, final x1, final x2)."""
    cdef cnp.ndarray[cnp.int8_t, ndim=1] out = np.zeros(n, dtype=np.int8)
    cdef long k = 0
    cdef double y1, y2
    while k < n:
        if x2 == 0.0:
            break
        if x2 <= 0.5:
            out[k] = 1
            y1 = x1 / (1.0 - x2)
            y2 = x2 / (1.0 - x2)
        elif x2 <= 1.0 - x1:
            out[k] = 2
            y1 = x1 / x2
            y2 = (1.0 - x2) / x2
        else:
            out[k] = 3
            y1 = (1.0 - x2) / x2
            y2 = x1 / x2
        x1 = y1
        x2 = y2
        k += 1
    return out[:k], x1, x2


def window_extrema(const unsigned char[:] word, int d, long max_len):
    """For window lengths n = 1..max_len: per-letter min and max letter count
    over all windows of length n.  Letters are coded 0..d-1.  Rows of the
    returned arrays are indexed by n - 1."""
    cdef Py_ssize_t L = word.shape[0], n, s
    cdef long m = min(max_len, L)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] mins = np.zeros((m, d), dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] maxs = np.zeros((m, d), dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=2] pre = np.zeros((L + 1, d), dtype=np.int64)
    cdef int a
    cdef long long c
    for s in range(L):
        for a in range(d):
            pre[s + 1, a] = pre[s, a]
        pre[s + 1, word[s]] += 1
    with nogil:
        for n in range(1, m + 1):
            for a in range(d):
                mins[n - 1, a] = pre[n, a]
                maxs[n - 1, a] = pre[n, a]
            for s in range(1, L - n + 1):
                for a in range(d):
                    c = pre[s + n, a] - pre[s, a]
                    if c < mins[n - 1, a]:
                        mins[n - 1, a] = c
                    elif c > maxs[n - 1, a]:
                        maxs[n - 1, a] = c
    return mins, maxs


def grid_query(const double[:, ::1] pts, const long long[:] keys,
               const long long[:] starts, const long long[:] ends,
               const long long[:] dims, const double[:] origin, double cell,
               const double[:, ::1] queries, double eps,
               const long long[:] labels, bint labelmask):
    """Sup-norm eps-neighbour queries against a uniform grid (cell >= eps).

    pts are sorted by cell key; keys are the sorted distinct cell keys with
    point ranges [starts, ends).  Returns per query either the number of
    points within eps or the OR of 1 << label over those points."""
    cdef Py_ssize_t nq = queries.shape[0], q, nk = keys.shape[0]
    cdef int D = pts.shape[1], t, a
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.zeros(nq, dtype=np.int64)
    cdef long long c[3]
    cdef long long cc[3]
    cdef long long key, lo, hi, mid, p, acc
    cdef int o0, o1, o2, ok
    cdef double diff
    if D != 3:
        raise ValueError("grid index expects 3-dimensional points")
    with nogil:
        for q in range(nq):
            for t in range(3):
                c[t] = <long long> floor((queries[q, t] - origin[t]) / cell)
            acc = 0
            for o0 in range(-1, 2):
                for o1 in range(-1, 2):
                    for o2 in range(-1, 2):
                        cc[0] = c[0] + o0
                        cc[1] = c[1] + o1
                        cc[2] = c[2] + o2
                        ok = 1
                        for t in range(3):
                            if cc[t] < 0 or cc[t] >= dims[t]:
                                ok = 0
                        if not ok:
                            continue
                        key = (cc[0] * dims[1] + cc[1]) * dims[2] + cc[2]
                        lo = 0
                        hi = nk
                        while lo < hi:
                            mid = (lo + hi) >> 1
                            if keys[mid] < key:
                                lo = mid + 1
                            else:
                                hi = mid
                        if lo == nk or keys[lo] != key:
                            continue
                        for p in range(starts[lo], ends[lo]):
                            ok = 1
                            for t in range(3):
                                diff = fabs(pts[p, t] - queries[q, t])
                                if diff > eps:
                                    ok = 0
                                    break
                            if ok:
                                if labelmask:
                                    acc = acc | ((<long long> 1) << labels[p])
                                else:
                                    acc += 1
            out[q] = acc
    return out
