"""Pure Python / numpy versions of the compiled kernels (same signatures)."""
from __future__ import annotations

import math

import numpy as np


def _as_lists(mats):
    return [[list(map(float, row)) for row in m] for m in np.asarray(mats)]


def vec_log_growth(idx, mats, v0, burn=0):
    A = _as_lists(mats)
    d = len(v0)
    v = [float(x) for x in v0]
    nrm = max(abs(x) for x in v)
    v = [x / nrm for x in v]
    total = 0.0
    for k, a in enumerate(np.asarray(idx).tolist()):
        m = A[a]
        w = [sum(m[i][j] * v[j] for j in range(d)) for i in range(d)]
        nrm = max(abs(x) for x in w)
        if nrm == 0.0:
            raise FloatingPointError("carried vector collapsed to zero")
        v = [x / nrm for x in w]
        if k >= burn:
            total += math.log(nrm)
    return total


def mat_log_growth(idx, mats, right, burn=0):
    A = _as_lists(mats)
    d = len(A[0])
    P = [[float(i == j) for j in range(d)] for i in range(d)]
    total = 0.0
    for k, a in enumerate(np.asarray(idx).tolist()):
        m = A[a]
        if right:
            Q = [[sum(P[i][l] * m[l][j] for l in range(d)) for j in range(d)] for i in range(d)]
        else:
            Q = [[sum(m[i][l] * P[l][j] for l in range(d)) for j in range(d)] for i in range(d)]
        nrm = max(sum(abs(x) for x in row) for row in Q)
        P = [[x / nrm for x in row] for row in Q]
        if k >= burn:
            total += math.log(nrm)
    return total


def brun_digits(x1, x2, n):
    out = []
    x1, x2 = float(x1), float(x2)
    while len(out) < n:
        if x2 == 0.0:
            break
        if x2 <= 0.5:
            out.append(1)
            x1, x2 = x1 / (1.0 - x2), x2 / (1.0 - x2)
        elif x2 <= 1.0 - x1:
            out.append(2)
            x1, x2 = x1 / x2, (1.0 - x2) / x2
        else:
            out.append(3)
            x1, x2 = (1.0 - x2) / x2, x1 / x2
    return np.array(out, dtype=np.int8), x1, x2


def window_extrema(word, d, max_len):
    word = np.asarray(word, dtype=np.int64)
    L = len(word)
    m = min(max_len, L)
    pre = np.zeros((L + 1, d), dtype=np.int64)
    if L:
        np.cumsum(np.eye(d, dtype=np.int64)[word], axis=0, out=pre[1:])
    mins = np.zeros((m, d), dtype=np.int64)
    maxs = np.zeros((m, d), dtype=np.int64)
    for n in range(1, m + 1):
        c = pre[n:] - pre[:-n]
        mins[n - 1] = c.min(axis=0)
        maxs[n - 1] = c.max(axis=0)
    return mins, maxs


_OFFSETS = np.array([(a, b, c) for a in (-1, 0, 1) for b in (-1, 0, 1) for c in (-1, 0, 1)],
                    dtype=np.int64)


def grid_query(pts, keys, starts, ends, dims, origin, cell, queries, eps, labels, labelmask,
               chunk=4096):
    pts = np.asarray(pts)
    queries = np.asarray(queries)
    keys = np.asarray(keys)
    dims = np.asarray(dims, dtype=np.int64)
    out = np.zeros(len(queries), dtype=np.int64)
    for s in range(0, len(queries), chunk):
        Q = queries[s:s + chunk]
        c = np.floor((Q - origin) / cell).astype(np.int64)
        for off in _OFFSETS:
            cc = c + off
            ok = np.all((cc >= 0) & (cc < dims), axis=1)
            key = (cc[:, 0] * dims[1] + cc[:, 1]) * dims[2] + cc[:, 2]
            pos = np.searchsorted(keys, key)
            pos_c = np.minimum(pos, len(keys) - 1)
            ok &= (pos < len(keys)) & (keys[pos_c] == key)
            qi = np.nonzero(ok)[0]
            if len(qi) == 0:
                continue
            lo, hi = starts[pos_c[qi]], ends[pos_c[qi]]
            cnt = hi - lo
            rep = np.repeat(qi, cnt)
            # point indices lo..hi-1 for each selected query
            first = np.repeat(lo - np.cumsum(cnt) + cnt, cnt)
            pidx = first + np.arange(cnt.sum())
            hit = np.all(np.abs(pts[pidx] - Q[rep]) <= eps, axis=1)
            if labelmask:
                bits = np.left_shift(np.int64(1), np.asarray(labels)[pidx[hit]])
                np.bitwise_or.at(out[s:s + chunk], rep[hit], bits)
            else:
                out[s:s + chunk] += np.bincount(rep[hit], minlength=len(Q))
    return out
