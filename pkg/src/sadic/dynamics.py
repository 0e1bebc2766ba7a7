"""Toral translations on 1-perp / Lambda, the domain exchange, natural codings,
bounded remainder statistics and recurrence functions.

Torus points are represented by vectors of 1-perp reduced modulo
Lambda = 1-perp cap Z^d in the basis {e_i - e_j : i != j}: the coordinate of
e_i - e_j is x_i, so reduction takes x_i mod 1 for i != j and fixes x_j by
sum zero.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from . import kernels
from .directive import DirectiveSequence, limit_word_prefix
from .fractal import LabeledCloud, cloud_from_word, word_array
from .geometry import project
from .spatial import GridIndex


def torus_reduce(x, j: int = 3) -> np.ndarray:
    """Canonical representative: coordinates i != j in [0, 1)."""
    x = np.array(x, dtype=np.float64)
    d = x.shape[-1]
    idx = [i for i in range(d) if i != j - 1]
    r = x[..., idx] - np.floor(x[..., idx])
    r[r >= 1.0] = 0.0
    out = np.empty_like(x)
    out[..., idx] = r
    out[..., j - 1] = -r.sum(axis=-1)
    return out


def torus_translate(t, x, j: int = 3, tol: float = 1e-9) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    if abs(t.sum()) > tol * max(1.0, np.abs(t).max()):
        raise ValueError("translation vector must lie in 1-perp")
    return torus_reduce(np.asarray(x, dtype=np.float64) + t, j)


def torus_distance(x, y, j: int = 3) -> float:
    """Sup-norm distance on the torus in the reduced coordinates i != j."""
    diff = torus_reduce(np.asarray(x) - np.asarray(y), j)
    idx = [i for i in range(diff.shape[-1]) if i != j - 1]
    a = np.abs(diff[..., idx])
    return float(np.max(np.minimum(a, 1.0 - a)))


def domain_exchange_step(cloud: LabeledCloud, u, x, eps: float, index: GridIndex | None = None):
    """(i, x + pi e_i) for the unique label whose subtile eps-contains x, else None."""
    x = np.asarray(x, dtype=np.float64)
    if index is None:
        index = GridIndex(cloud.points, max(eps, 1e-9), cloud.labels)
    mask = int(index.label_mask(x[None], eps)[0])
    if mask == 0 or mask & (mask - 1):
        return None
    i = mask.bit_length() - 1
    e = np.zeros(len(x))
    e[i - 1] = 1.0
    return i, x + project(u, np.ones(len(x)), e)


def _periodized(points: np.ndarray, labels: np.ndarray, j: int, margin: float):
    """Reduced cloud plus copies shifted by lattice vectors, covering a margin
    around the fundamental domain."""
    red = torus_reduce(points, j)
    d = points.shape[1]
    idx = [i for i in range(d) if i != j - 1]
    pts, labs = [red], [labels]
    for shift in np.ndindex(*([3] * (d - 1))):
        s = np.array(shift) - 1
        if not s.any():
            continue
        v = np.zeros(d)
        v[idx] = s
        v[j - 1] = -s.sum()
        q = red + v
        keep = np.all((q[:, idx] >= -margin) & (q[:, idx] < 1 + margin), axis=1)
        pts.append(q[keep])
        labs.append(labels[keep])
    return np.concatenate(pts), np.concatenate(labs)


@dataclass
class CodingReport:
    matched: int
    ambiguous: int                 # uncovered + conflicting
    mismatched: int
    N: int
    epsilon: float = 0.0
    cloud_size: int = 0
    uncovered: int = 0             # no cloud point within eps
    conflicting: int = 0           # several labels within eps

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def _coding_setup(seq, depth, u, t, N, min_len, j, exclude_orbit, margin):
    u = np.asarray(u, dtype=np.float64)
    d = len(u)
    min_len = min_len or max(200_000, 10 * N)
    word = limit_word_prefix(seq, depth, max(min_len, N + 1))
    cloud = cloud_from_word(word, u, np.ones(d))
    start = N if exclude_orbit else 0
    pts, labs = _periodized(cloud.points[start:], cloud.labels[start:], j, margin)
    orbit = np.empty((N, d))
    x = np.zeros(d)
    for n in range(N):
        orbit[n] = x
        x = torus_translate(t, x, j)
    return pts, labs, orbit, word_array(word[:N]).astype(np.int64)


def _score(pts, labs, orbit, expected, eps) -> CodingReport:
    masks = GridIndex(pts, eps, labs).label_mask(orbit, eps)
    matched = uncovered = conflicting = mismatched = 0
    for m, e in zip(masks.tolist(), expected.tolist()):
        if m == 0:
            uncovered += 1
        elif m & (m - 1):
            conflicting += 1
        elif m.bit_length() - 1 == e:
            matched += 1
        else:
            mismatched += 1
    return CodingReport(matched, uncovered + conflicting, mismatched, len(orbit), float(eps),
                        len(pts), uncovered, conflicting)


def natural_coding_check(seq: DirectiveSequence, depth: int, u, t, N: int, eps: float,
                         min_len: int | None = None, j: int = 3,
                         exclude_orbit: bool = True) -> CodingReport:
    """Code the orbit of 0 under x -> x + t by eps-membership in the subtile
    clouds reduced mod Lambda and compare with the limit word.

    The cloud is the limit-word cloud; with ``exclude_orbit`` its first N
    points (which are the orbit itself, up to Lambda) are left out, so each
    symbol is decoded from other points of the subtiles only.
    """
    if N == 0:
        return CodingReport(0, 0, 0, 0, eps, 0)
    setup = _coding_setup(seq, depth, u, t, N, min_len, j, exclude_orbit, 2 * eps)
    return _score(*setup, eps)


def natural_coding_scan(seq: DirectiveSequence, depth: int, u, t, N: int, eps_list,
                        min_len: int | None = None, j: int = 3,
                        exclude_orbit: bool = True) -> list[CodingReport]:
    """natural_coding_check over several eps with one shared cloud."""
    eps_list = sorted(eps_list, reverse=True)
    if N == 0:
        return [CodingReport(0, 0, 0, 0, e, 0) for e in eps_list]
    setup = _coding_setup(seq, depth, u, t, N, min_len, j, exclude_orbit, 2 * eps_list[0])
    return [_score(*setup, e) for e in eps_list]


def finest_covered(reports: list[CodingReport]) -> CodingReport:
    """Report with the smallest eps at which every orbit point has a cloud
    point within eps (the cloud resolves the orbit); the coarsest otherwise."""
    ok = [r for r in reports if r.uncovered == 0]
    if not ok:
        return max(reports, key=lambda r: r.epsilon)
    return min(ok, key=lambda r: r.epsilon)


# ---------------------------------------------------------------- statistics

def bounded_remainder_stats(word: str, freq, N: int) -> np.ndarray:
    """Per letter, max over n <= N of |count of i in word[:n] - n freq_i|."""
    if len(word) < N:
        raise ValueError("word shorter than horizon")
    freq = np.asarray(freq, dtype=np.float64)
    d = len(freq)
    a = word_array(word[:N]).astype(np.int64) - 1
    counts = np.zeros((N + 1, d))
    if N:
        counts[1:] = np.cumsum(np.eye(d)[a], axis=0)
    n = np.arange(N + 1)[:, None]
    return np.max(np.abs(counts - n * freq), axis=0)


def word_balance(word: str, max_len: int, d: int = 3, backend=None) -> int:
    """Balance constant of the set of factors of length <= max_len of word."""
    impl = backend or kernels
    a = np.ascontiguousarray(word_array(word) - 1, dtype=np.uint8)
    if len(a) == 0:
        return 0
    mins, maxs = impl.window_extrema(a, d, max_len)
    return int(np.max(maxs - mins))


def language_balance(words, max_len: int, d: int = 3, backend=None) -> int:
    """Balance constant of the union of the factor sets of several words."""
    impl = backend or kernels
    lo = hi = None
    for w in words:
        a = np.ascontiguousarray(word_array(w) - 1, dtype=np.uint8)
        mins, maxs = impl.window_extrema(a, d, max_len)
        m = min(len(mins), max_len)
        if lo is None:
            lo, hi = np.full((max_len, d), np.iinfo(np.int64).max), np.full((max_len, d), -1)
        lo[:m] = np.minimum(lo[:m], mins)
        hi[:m] = np.maximum(hi[:m], maxs)
    ok = hi[:, 0] >= 0
    return int(np.max(hi[ok] - lo[ok])) if ok.any() else 0


@dataclass
class RecurrenceResult:
    values: list[tuple[int, int]]       # (n, R(n))
    insufficient: list[int]             # n whose R(n) could not be certified
    max_ratio: float

    def to_dict(self):
        return {"values": [list(v) for v in self.values], "insufficient": self.insufficient,
                "max_ratio": self.max_ratio}


def recurrence_estimate(word: str, n_max: int) -> RecurrenceResult:
    """Empirical recurrence function: smallest k such that every length-k
    window of the word contains every length-n factor of the word.

    For a factor with occurrences p_1 < p_2 < ..., windows must cover the
    initial gap and every gap between occurrences: k >= n + max(p_1, p_{a+1} - p_a - 1).
    The value is flagged insufficient if the tail after the last occurrence
    exceeds that bound (the finite word cannot confirm recurrence there).
    """
    L = len(word)
    values, bad = [], []
    for n in range(1, n_max + 1):
        if n > L:
            break
        last: dict[str, int] = {}
        gap: dict[str, int] = {}
        for p in range(L - n + 1):
            f = word[p:p + n]
            if f in last:
                g = p - last[f] - 1
                if g > gap[f]:
                    gap[f] = g
            else:
                gap[f] = p
            last[f] = p
        R = n + max(gap.values())
        if any(L - n - last[f] > R - n for f in last):
            bad.append(n)
        values.append((n, R))
    ratio = max((r / n for n, r in values), default=0.0)
    return RecurrenceResult(values, bad, ratio)
