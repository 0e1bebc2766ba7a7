"""Rauzy fractal point clouds, Rauzy boxes, Hausdorff distances and
sampling estimates of the covering degree of the lattice translates.

Covering degree.  A sample point s is counted against every tile
x + R(i) (x a lattice translate).  ``method="density"`` (default) counts, for
each tile, the cloud points within eps of s; since cloud points are
equidistributed in each subtile with a common density, the sum over tiles
divided by the typical single-tile count is the number of sheets over s.
``method="dilation"`` counts a tile as soon as one of its points is within
eps; this overcounts near tile boundaries, where eps-neighbourhoods of
adjacent tiles overlap.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .directive import DirectiveSequence, limit_word_prefix
from .geometry import Face, level_frame, project, set_equation_decompose, _to_float
from .directive import product_matrix
from .spatial import GridIndex


def word_array(w: str) -> np.ndarray:
    """Letters of w as a uint8 array of values 1..d."""
    return np.frombuffer(w.encode("ascii"), dtype=np.uint8) - 48


def prefix_abelianizations(w: str, d: int = 3) -> np.ndarray:
    """Row k = l(w[:k]) for k = 0..|w|-1."""
    a = word_array(w).astype(np.int64) - 1
    out = np.zeros((len(a), d), dtype=np.int64)
    if len(a) > 1:
        np.cumsum(np.eye(d, dtype=np.int64)[a[:-1]], axis=0, out=out[1:])
    return out


@dataclass
class LabeledCloud:
    points: np.ndarray            # (n, d) float
    labels: np.ndarray            # (n,) int, values 1..d
    u: np.ndarray = field(default_factory=lambda: np.ones(3) / 3)
    w: np.ndarray = field(default_factory=lambda: np.ones(3))
    depth: int = 0

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64).reshape(-1, len(self.u))
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if len(self.points) != len(self.labels):
            raise ValueError("points and labels differ in length")

    def __len__(self):
        return len(self.labels)

    def subtile(self, i: int) -> "LabeledCloud":
        m = self.labels == i
        return LabeledCloud(self.points[m], self.labels[m], self.u, self.w, self.depth)

    def diameter(self) -> float:
        if len(self) == 0:
            return 0.0
        return float(np.max(self.points.max(axis=0) - self.points.min(axis=0)))

    def to_csv(self) -> str:
        lines = [",".join(repr(float(c)) for c in p) + f",{int(l)}"
                 for p, l in zip(self.points, self.labels)]
        return "p1,p2,p3,label\n" + "".join(s + "\n" for s in lines)

    @classmethod
    def from_csv(cls, text: str) -> "LabeledCloud":
        rows = [line.split(",") for line in text.splitlines()[1:] if line.strip()]
        pts = np.array([[float(c) for c in r[:-1]] for r in rows]).reshape(-1, 3)
        lab = np.array([int(r[-1]) for r in rows], dtype=np.int64)
        return cls(pts, lab)


def subtile(cloud: LabeledCloud, i: int) -> LabeledCloud:
    return cloud.subtile(i)


def cloud_from_word(w: str, u, wvec, depth: int = 0) -> LabeledCloud:
    """(project(u, w, l(p)), next letter) for every proper prefix p of the word."""
    u = np.asarray(u, float)
    wvec = np.asarray(wvec, float)
    ab = prefix_abelianizations(w, len(u)).astype(np.float64)
    return LabeledCloud(project(u, wvec, ab), word_array(w).astype(np.int64), u, wvec, depth)


def rauzy_cloud(seq: DirectiveSequence, depth: int, min_len: int, u, w,
                level: int = 0) -> LabeledCloud:
    """Cloud approximating R_w(i).  With level > 0, the subtiles R^(level)(i) in
    the frame (M_[0,level)^{-1} u, tM_[0,level) w)."""
    word = limit_word_prefix(seq, depth, min_len, level=level)
    if level:
        u, w = level_frame(seq, level, u, w)
    return cloud_from_word(word, u, w, depth)


def hausdorff(a, b) -> float:
    """Symmetric sup-norm Hausdorff distance between two point sets."""
    pa = a.points if isinstance(a, LabeledCloud) else np.asarray(a, float)
    pb = b.points if isinstance(b, LabeledCloud) else np.asarray(b, float)
    if len(pa) == 0 or len(pb) == 0:
        raise ValueError("Hausdorff distance needs non-empty sets")
    da, _ = cKDTree(pb).query(pa, p=np.inf)
    db, _ = cKDTree(pa).query(pb, p=np.inf)
    return float(max(da.max(), db.max()))


def set_equation_cloud(seq: DirectiveSequence, k: int, l: int, f: Face, u, w,
                       depth: int, min_len: int) -> np.ndarray:
    """Union of offset + M_[k,l) R^(l)(j) over the set-equation pieces of
    pi^(k) x + R^(k)(i); R^(l) is taken from the level-l limit word cloud."""
    lev = rauzy_cloud(seq, depth, min_len, u, w, level=l)
    mkl = _to_float(product_matrix(seq, k, l))
    parts = []
    for off, g in set_equation_decompose(seq, k, l, f, u, w):
        sub = lev.points[lev.labels == g.i]
        parts.append(sub @ mkl.T + off)
    return np.concatenate(parts) if parts else np.zeros((0, len(u)))


def rauzy_box_cloud(seq: DirectiveSequence, depth: int, u, w, slices: int,
                    min_len: int = 10_000) -> LabeledCloud:
    """Points t (e_i - pi e_i) - y over cloud points (y, i) and t = k / slices."""
    cloud = rauzy_cloud(seq, depth, min_len, u, w)
    return box_from_cloud(cloud, slices)


def box_from_cloud(cloud: LabeledCloud, slices: int) -> LabeledCloud:
    if slices < 1:
        raise ValueError("slices must be >= 1")
    d = len(cloud.u)
    eye = np.eye(d)
    lift = eye - project(cloud.u, cloud.w, eye)      # row i = e_i - pi e_i
    ts = np.arange(slices) / slices
    pts = (ts[:, None, None] * lift[cloud.labels - 1][None] - cloud.points[None]).reshape(-1, d)
    lab = np.tile(cloud.labels, slices)
    return LabeledCloud(pts, lab, cloud.u, cloud.w, cloud.depth)


# ---------------------------------------------------------------- covering

@dataclass
class CoverHistogram:
    counts: dict[int, int]
    epsilon: float
    samples: int
    seed: int
    method: str = "density"
    unit: float | None = None      # typical points-per-tile within eps (density method)

    def fraction(self, m: int) -> float:
        return self.counts.get(m, 0) / self.samples if self.samples else 0.0

    def mode(self) -> int:
        return max(self.counts, key=lambda k: (self.counts[k], -k))

    def to_json(self) -> str:
        return json.dumps({"counts": {str(k): v for k, v in sorted(self.counts.items())},
                           "epsilon": self.epsilon, "samples": self.samples,
                           "seed": self.seed, "method": self.method, "unit": self.unit},
                          sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "CoverHistogram":
        o = json.loads(text)
        return cls({int(k): v for k, v in o["counts"].items()}, o["epsilon"], o["samples"],
                   o["seed"], o.get("method", "density"), o.get("unit"))


# orthonormal basis of 1-perp
_B1 = np.array([1.0, -1.0, 0.0]) / math.sqrt(2)
_B2 = np.array([1.0, 1.0, -2.0]) / math.sqrt(6)


def sample_hexagon(n: int, radius: float, rng: np.random.Generator) -> np.ndarray:
    """Uniform samples of {x in 1-perp : ||x||_inf <= radius} (a hexagon)."""
    out = np.zeros((0, 3))
    box = radius * 1.5
    while len(out) < n:
        ab = rng.uniform(-box, box, size=(2 * n, 2))
        p = ab[:, :1] * _B1 + ab[:, 1:] * _B2
        p = p[np.max(np.abs(p), axis=1) <= radius]
        out = np.concatenate([out, p])
    return out[:n]


def lattice_translates(radius: int) -> list[tuple[int, int, int]]:
    """Integer points of 1-perp with sup-norm <= radius."""
    r = int(radius)
    return [(a, b, -a - b) for a in range(-r, r + 1) for b in range(-r, r + 1)
            if abs(a + b) <= r]


def covering_histogram(seq: DirectiveSequence, depth: int, u, translates, eps: float,
                       samples: int, rng_seed: int, min_len: int = 100_000,
                       method: str = "density", cloud: LabeledCloud | None = None
                       ) -> CoverHistogram:
    """Sampled multiplicities of the collection {pi x + R(i) : [x, i] in translates}.

    translates must be faces of Gamma(1); samples are drawn uniformly from the
    sup-norm ball (a hexagon in 1-perp) inscribed in the translate footprint and
    shrunk by the cloud diameter.
    """
    if method not in ("density", "dilation"):
        raise ValueError("method must be 'density' or 'dilation'")
    u = np.asarray(u, float)
    one = np.ones(3)
    if cloud is None:
        cloud = rauzy_cloud(seq, depth, min_len, u, one)
    translates = sorted(set(translates))
    for f in translates:
        if sum(f.x) != 0:
            raise ValueError(f"translate {f} is not a face of Gamma(1)")
    diam = cloud.diameter()
    tset = set(translates)
    letters = sorted({f.i for f in translates})
    # footprint: largest r such that all lattice points of norm <= r carry every letter
    r = -1
    while r < 10_000 and all(Face(t, i) in tset for t in lattice_translates(r + 1)
                             for i in range(1, 4)):
        r += 1
    radius = r - diam - eps
    if radius <= 0:
        raise ValueError(f"translate patch (radius {r}) too small for cloud diameter {diam:.3f}")
    rng = np.random.default_rng(rng_seed)
    pts = sample_hexagon(samples, radius, rng)
    cell = eps
    index = {i: GridIndex(cloud.points[cloud.labels == i], cell) for i in letters}
    reach = diam + eps
    per_tile = []
    for f in translates:
        off = project(u, one, np.array(f.x, float))
        near = np.nonzero(np.max(np.abs(pts - off), axis=1) <= reach + 1e-12)[0]
        c = np.zeros(samples, dtype=np.int64)
        if len(near):
            c[near] = index[f.i].count(pts[near] - off, eps)
        per_tile.append(c)
    C = np.stack(per_tile) if per_tile else np.zeros((0, samples), dtype=np.int64)
    if method == "dilation":
        mult = (C > 0).sum(axis=0)
        unit = None
    else:
        top = C.max(axis=0)
        unit = float(np.median(top[top > 0])) if np.any(top > 0) else 1.0
        mult = np.rint(C.sum(axis=0) / unit).astype(np.int64)
    vals, cnt = np.unique(mult, return_counts=True)
    return CoverHistogram({int(v): int(c) for v, c in zip(vals, cnt)}, float(eps), int(samples),
                          int(rng_seed), method, unit)


def box_covering_histogram(box: LabeledCloud, eps: float, samples: int, rng_seed: int,
                           span: int = 1) -> CoverHistogram:
    """Density-method multiplicity of the Z^3 translates of a Rauzy box cloud,
    sampled uniformly in the unit cube."""
    rng = np.random.default_rng(rng_seed)
    pts = rng.random((samples, 3))
    g = GridIndex(box.points, eps)
    lo = np.floor(box.points.min(axis=0)).astype(int) - span
    hi = np.ceil(box.points.max(axis=0)).astype(int) + span
    counts = []
    for z in np.ndindex(*(hi - lo + 1)):
        z = np.array(z) + lo
        # points p of z + box near s  <=>  box points near s - z
        c = g.count(pts - z, eps)
        if c.any():
            counts.append(c)
    C = np.stack(counts)
    top = C.max(axis=0)
    unit = float(np.median(top[top > 0]))
    mult = np.rint(C.sum(axis=0) / unit).astype(np.int64)
    vals, cnt = np.unique(mult, return_counts=True)
    return CoverHistogram({int(v): int(c) for v, c in zip(vals, cnt)}, float(eps), int(samples),
                          int(rng_seed), "density", unit)
