"""Brun and Arnoux-Rauzy continued fraction algorithms and their substitutions.

Brun map on D2 = {0 <= x1 <= x2 <= 1}:

    branch 1 (x2 <= 1/2)          (x1/(1-x2), x2/(1-x2))
    branch 2 (1/2 <= x2 <= 1-x1)  (x1/x2, (1-x2)/x2)
    branch 3 (1-x1 <= x2)         ((1-x2)/x2, x1/x2)

On overlaps the smallest branch index wins.  With w = (x1, x2, 1) and w'
built from the image point, M_i w' is proportional to w for the i-th Brun
matrix.  Works with floats or with ``fractions.Fraction`` (exact orbits).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .words import Substitution, compose_all, permutation

TOL = 1e-12


def brun_substitutions() -> tuple[Substitution, Substitution, Substitution]:
    return (Substitution(["1", "23", "3"], name="b1"),
            Substitution(["1", "3", "23"], name="b2"),
            Substitution(["3", "1", "23"], name="b3"))


def ar_substitutions() -> tuple[Substitution, Substitution, Substitution]:
    # alpha_i: i -> i, j -> j i
    return tuple(Substitution([str(j) if j == i else f"{j}{i}" for j in (1, 2, 3)],
                              name=f"a{i}") for i in (1, 2, 3))


def brun_sigma_substitutions() -> tuple[Substitution, Substitution, Substitution]:
    return (Substitution(["1", "2", "32"], name="s1"),
            Substitution(["1", "3", "23"], name="s2"),
            Substitution(["2", "3", "13"], name="s3"))


BRUN_MATRICES = (((1, 0, 0), (0, 1, 0), (0, 1, 1)),
                 ((1, 0, 0), (0, 0, 1), (0, 1, 1)),
                 ((0, 1, 0), (0, 0, 1), (1, 0, 1)))


# ---------------------------------------------------------------- Brun map

def brun_branch(x1, x2) -> int:
    if x2 <= 0.5:
        return 1
    if x2 <= 1 - x1:
        return 2
    return 3


def _in_simplex(x1, x2, tol) -> bool:
    return -tol <= x1 <= x2 + tol and x2 <= 1 + tol


def brun_step(p: Sequence) -> tuple[int, tuple]:
    """One step of the Brun map.  Returns (branch, image point)."""
    x1, x2 = p
    if not _in_simplex(x1, x2, TOL):
        raise ValueError(f"point {p} is not in the simplex 0 <= x1 <= x2 <= 1")
    if x2 == 0:
        raise ZeroDivisionError("Brun map undefined for x2 = 0")
    b = brun_branch(x1, x2)
    if b == 1:
        y = (x1 / (1 - x2), x2 / (1 - x2))
    elif b == 2:
        y = (x1 / x2, (1 - x2) / x2)
    else:
        y = ((1 - x2) / x2, x1 / x2)
    if not _in_simplex(*y, TOL):
        raise ArithmeticError(f"Brun iterate {y} drifted out of the simplex")
    return b, y


@dataclass
class Expansion:
    """Digits of an expansion plus the reason it stopped early (if it did)."""
    digits: list[int]
    point: tuple
    stopped: str | None = None

    def __str__(self):
        return "".join(map(str, self.digits))


def brun_expand(p: Sequence, n: int, exact: bool = False) -> Expansion:
    """First n Brun branch indices of p.

    ``exact=True`` converts the input to Fractions first (useful for rational
    points, whose orbits terminate on x2 = 0).
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    x = tuple(Fraction(c) for c in p) if exact else tuple(p)
    digits = []
    for _ in range(n):
        if x[1] == 0:
            return Expansion(digits, x, stopped="iterate reached x2 = 0")
        b, x = brun_step(x)
        digits.append(b)
    return Expansion(digits, x)


def brun_frequency(p: Sequence) -> np.ndarray:
    """Letter frequency vector (x1, x2, 1)/(1 + x1 + x2) attached to p."""
    x1, x2 = float(p[0]), float(p[1])
    return np.array([x1, x2, 1.0]) / (1.0 + x1 + x2)


def relate_brun(indices: Sequence[int]) -> bool:
    """Check beta_{i0}...beta_{in} = s2 s_{i0} ... s_{i(n-1)} pi as substitutions,
    with pi the transposition (23), the identity or (12) for i_n = 1, 2, 3."""
    if not indices:
        raise ValueError("need a non-empty index list")
    beta = brun_substitutions()
    sig = brun_sigma_substitutions()
    tail = {1: permutation([1, 3, 2]), 2: permutation([1, 2, 3]),
            3: permutation([2, 1, 3])}[indices[-1]]
    lhs = compose_all([beta[i - 1] for i in indices])
    rhs = compose_all([sig[1]] + [sig[i - 1] for i in indices[:-1]] + [tail])
    return lhs == rhs


# ---------------------------------------------------------------- Brun measure

def invariant_density(p: Sequence) -> float:
    """Density of the absolutely continuous invariant probability of the Brun map
    on D2, h = 12 / (pi^2 x2 (1 + x1)).  See notes in README on the variable order."""
    x1, x2 = float(p[0]), float(p[1])
    if x2 <= 0:
        raise ValueError("density undefined for x2 = 0")
    return 12.0 / (math.pi ** 2 * x2 * (1.0 + x1))


# proposal: x2 ~ U(0,1), x1 | x2 ~ U(0,x2), density 1/x2 on D2.
# h / proposal = 12 / (pi^2 (1 + x1)) <= 12 / pi^2, accept with prob 1/(1 + x1).
PROPOSAL_BOUND = 12.0 / math.pi ** 2


def sample_invariant(n: int, rng_seed) -> np.ndarray:
    """n points of D2 drawn from the Brun invariant density by rejection."""
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    out = np.empty((n, 2))
    filled = 0
    while filled < n:
        m = max(16, int(1.6 * (n - filled)))
        x2 = 1.0 - rng.random(m)          # (0, 1]
        x1 = x2 * rng.random(m)
        keep = rng.random(m) * (1.0 + x1) < 1.0
        take = min(int(keep.sum()), n - filled)
        out[filled:filled + take, 0] = x1[keep][:take]
        out[filled:filled + take, 1] = x2[keep][:take]
        filled += take
    return out


def density_cell_mass(a1, b1, a2, b2) -> float:
    """Exact invariant mass of the rectangle [a1,b1]x[a2,b2] intersected with D2.

    Integrating 12/(pi^2 x2 (1+x1)) over x1 in [a1, min(b1, x2)] gives
    (12/pi^2) * int log((1+min(b1,x2))/(1+a1)) / x2 dx2, done by quadrature.
    """
    from scipy.integrate import quad

    def inner(x2):
        top = min(b1, x2)
        if top <= a1:
            return 0.0
        return math.log((1 + top) / (1 + a1)) / x2

    lo = max(a2, a1)
    if lo >= b2:
        return 0.0
    pts = [p for p in (b1,) if lo < p < b2]
    val, _ = quad(inner, lo, b2, points=pts or None, limit=200)
    return 12.0 / math.pi ** 2 * val


# ---------------------------------------------------------------- Arnoux-Rauzy

def ar_step(v: Sequence):
    """Fully subtractive Arnoux-Rauzy step on a positive vector.

    Returns (i, v') where v_i exceeds the sum of the others and v' replaces v_i
    by v_i - sum_{j != i} v_j, so that M_{alpha_i} v' = v.  Returns None when no
    coordinate dominates.
    """
    v = tuple(v)
    if any(c <= 0 for c in v):
        raise ValueError("AR step needs a positive vector")
    total = sum(v)
    for i, c in enumerate(v):
        rest = total - c
        if c > rest:
            w = list(v)
            w[i] = c - rest
            return i + 1, tuple(w)
    return None


def ar_expand(v: Sequence, n: int) -> Expansion:
    digits = []
    x = tuple(v)
    for _ in range(n):
        r = ar_step(x)
        if r is None:
            return Expansion(digits, x, stopped="no dominant coordinate")
        i, x = r
        digits.append(i)
    return Expansion(digits, x)
