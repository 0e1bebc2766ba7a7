"""Eigenvector approximations, projections, discrete hyperplanes and E1*.

A face [x, i] is ``Face(x, i)`` with x a tuple of ints.  Patches are
frozensets of faces; ``sorted_faces`` gives the canonical (lexicographic)
order used for output.
"""
from __future__ import annotations

import math
import warnings
from fractions import Fraction
from functools import lru_cache
from numbers import Integral, Rational
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .directive import DirectiveSequence, product_matrix
from .words import Matrix, Substitution, inverse_unimodular, mat_vec, transpose

TOL = 1e-12


class Face(NamedTuple):
    x: tuple[int, ...]
    i: int

    def __repr__(self):
        return f"[{self.x},{self.i}]"


Patch = frozenset


def face(x: Sequence[int], i: int) -> Face:
    return Face(tuple(int(c) for c in x), int(i))


def sorted_faces(p: Iterable[Face]) -> list[Face]:
    return sorted(p)


def patch_to_csv(p: Iterable[Face]) -> str:
    return "".join(",".join(map(str, f.x)) + f",{f.i}\n" for f in sorted_faces(p))


def patch_from_csv(text: str) -> frozenset:
    out = set()
    for line in text.splitlines():
        if line.strip():
            *x, i = (int(c) for c in line.split(","))
            out.add(Face(tuple(x), i))
    return frozenset(out)


def vector_to_csv(v) -> str:
    return ",".join(repr(float(c)) if not isinstance(c, Integral) else str(c) for c in v) + "\n"


def vector_from_csv(text: str) -> np.ndarray:
    return np.array([float(c) for c in text.strip().split(",")])


# ---------------------------------------------------------------- eigenvectors

def _to_float(m: Matrix) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in m])


def right_eigenvector_approx(seq: DirectiveSequence, n: int) -> np.ndarray:
    """Sum-normalized average of the column directions of M_[0,n)."""
    m = seq.prefix_matrix(n)
    cols = [[row[j] for row in m] for j in range(len(m))]
    if not any(all(c > 0 for c in col) for col in cols) and n > 0:
        warnings.warn("M_[0,n) has no positive column; direction may be degenerate")
    dirs = [np.array([float(Fraction(c, sum(col))) for c in col]) for col in cols]
    u = np.mean(dirs, axis=0)
    return u / u.sum()


def recurrent_left_vector_approx(seq: DirectiveSequence, n: int) -> np.ndarray:
    """Sum-normalized tM_[0,n) 1."""
    m = seq.prefix_matrix(n)
    v = [sum(col) for col in zip(*m)]  # column sums = tM 1
    s = sum(v)
    return np.array([float(Fraction(c, s)) for c in v])


def eigen_residual(m: Matrix, u: np.ndarray) -> tuple[float, float]:
    """(lambda, ||M u - lambda u||_inf) with lambda = <1, M u> / <1, u>."""
    mu = _to_float(m) @ u
    lam = mu.sum() / u.sum()
    return float(lam), float(np.max(np.abs(mu - lam * u)))


def angle(a: np.ndarray, b: np.ndarray) -> float:
    """Angle between two vectors; atan2 form stays accurate for tiny angles."""
    a = np.asarray(a, float) / np.linalg.norm(a)
    b = np.asarray(b, float) / np.linalg.norm(b)
    return float(2.0 * math.atan2(np.linalg.norm(a - b), np.linalg.norm(a + b)))


# ---------------------------------------------------------------- projection

def project(u, w, x) -> np.ndarray:
    """Projection along u onto the hyperplane w-perp.  x may be (d,) or (n, d)."""
    u = np.asarray(u, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    wu = float(np.dot(w, u))
    if abs(wu) <= TOL * np.linalg.norm(w) * np.linalg.norm(u):
        raise ValueError("projection undefined: <w, u> = 0")
    x = np.asarray(x, dtype=np.float64)
    return x - np.multiply.outer(x @ w / wu, u)


# ---------------------------------------------------------------- discrete planes

def _exact(w) -> bool:
    return all(isinstance(c, (Integral, Rational)) for c in w)


def in_plane(w, f: Face) -> bool:
    """Membership [x, i] in Gamma(w): 0 <= <w, x> < w_i."""
    s = sum(a * b for a, b in zip(w, f.x))
    wi = w[f.i - 1]
    if _exact(w):
        return 0 <= s < wi
    scale = TOL * max(1.0, float(np.max(np.abs(np.asarray(w, dtype=float)))))
    return -scale <= s < wi - scale


def hyperplane_patch(w, radius: float) -> frozenset:
    """All faces [x, i] of Gamma(w) with ||x||_inf <= radius."""
    w = tuple(w)
    if any(c < 0 for c in w) or not any(c != 0 for c in w):
        raise ValueError("w must be non-negative and non-zero")
    if not _exact(w):
        w = tuple(float(c) for c in w)
    r = int(math.floor(radius))
    d = len(w)
    out = set()
    last = max(range(d), key=lambda k: w[k])  # solve for the coordinate with largest weight
    others = [k for k in range(d) if k != last]
    wl = w[last]
    for head in np.ndindex(*([2 * r + 1] * (d - 1))):
        x = [0] * d
        for k, h in zip(others, head):
            x[k] = h - r
        s = sum(w[k] * x[k] for k in others)
        for i in range(1, d + 1):
            wi = w[i - 1]
            if wi == 0:
                continue
            # 0 <= s + wl*t < wi
            if _exact(w):
                lo = _ceil_div(-s, wl)
                hi = _ceil_div(wi - s, wl) - 1
            else:
                lo = math.ceil((-s) / wl - 1e-9)
                hi = math.floor((wi - s) / wl + 1e-9)
            for t in range(max(lo, -r), min(hi, r) + 1):
                x[last] = t
                f = Face(tuple(x), i)
                if in_plane(w, f):
                    out.add(f)
    return frozenset(out)


def _ceil_div(a, b):
    if isinstance(a, Integral) and isinstance(b, Integral):
        return -((-a) // b)
    return math.ceil(Fraction(a) / Fraction(b))


# ---------------------------------------------------------------- E1*

@lru_cache(maxsize=None)
def _dual_table(sigma: Substitution):
    """For each letter i: list of (j, l(p)) with p i a prefix of sigma(j)."""
    d = sigma.d
    tab = {i: [] for i in range(1, d + 1)}
    for j, w in enumerate(sigma.images, start=1):
        ab = [0] * d
        for c in w:
            tab[int(c)].append((j, tuple(ab)))
            ab[int(c) - 1] += 1
    return tab


def dual_image(sigma: Substitution, f: Face) -> frozenset:
    minv = sigma.inverse_matrix
    out = set()
    for j, lp in _dual_table(sigma)[f.i]:
        y = mat_vec(minv, [a + b for a, b in zip(f.x, lp)])
        out.add(Face(tuple(y), j))
    return frozenset(out)


def dual_image_patch(sigma: Substitution, p: Iterable[Face]) -> frozenset:
    out = set()
    for f in p:
        out |= dual_image(sigma, f)
    return frozenset(out)


def dual_image_seq(seq: DirectiveSequence, k: int, l: int, p: Iterable[Face]) -> frozenset:
    """E1*(sigma_[k,l)) P = E1*(sigma_{l-1}) ... E1*(sigma_k) P."""
    p = frozenset(p)
    for n in range(k, l):
        p = dual_image_patch(seq.term(n), p)
    return p


# ---------------------------------------------------------------- set equation

def level_frame(seq: DirectiveSequence, l: int, u, w) -> tuple[np.ndarray, np.ndarray]:
    """(M_[0,l)^{-1} u, tM_[0,l) w): the projection frame at level l."""
    m = seq.prefix_matrix(l)
    minv = _to_float(inverse_unimodular(m))
    return minv @ np.asarray(u, float), _to_float(transpose(m)) @ np.asarray(w, float)


def set_equation_decompose(seq: DirectiveSequence, k: int, l: int, f: Face, u, w):
    """Pieces of pi^(k) x + R^(k)(i) as (offset, [y, j]) with
    offset = M_[k,l) pi^(l)(y); the piece is offset + M_[k,l) R^(l)(j)."""
    if not k < l:
        raise ValueError("need k < l")
    ul, wl = level_frame(seq, l, u, w)
    mkl = _to_float(product_matrix(seq, k, l))
    pieces = []
    for g in sorted_faces(dual_image_seq(seq, k, l, [f])):
        off = mkl @ project(ul, wl, np.array(g.x, dtype=float))
        pieces.append((off, g))
    return pieces
