"""Strong / negative strong / geometric coincidence and geometric finiteness.

All checks return certificates (``CoincidenceWitness``) holding everything
needed to re-verify them from scratch with ``verify_witness``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.spatial import cKDTree

from .directive import DirectiveSequence, image_word, product_matrix
from .geometry import Face, dual_image_seq, hyperplane_patch, in_plane, project
from .words import inverse_unimodular

KINDS = ("strong", "negative_strong", "geometric", "finiteness")


@dataclass
class CoincidenceWitness:
    kind: str
    index: int                    # l for (negative) strong, n for geometric / finiteness
    detail: dict = field(default_factory=dict)
    seq: str = ""

    def to_json(self) -> str:
        return json.dumps({"kind": self.kind, "index": self.index, "seq": self.seq,
                           "detail": self.detail}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "CoincidenceWitness":
        o = json.loads(text)
        return cls(o["kind"], o["index"], o["detail"], o.get("seq", ""))


# ---------------------------------------------------------------- (negative) strong

def _pair_witness(w1: str, w2: str) -> tuple[int, int] | None:
    """Smallest k with l(w1[:k]) = l(w2[:k]) and w1[k] = w2[k]; returns (k, letter)."""
    diff = [0] * 10
    nz = 0
    for k in range(min(len(w1), len(w2))):
        a, b = w1[k], w2[k]
        if nz == 0 and a == b:
            return k, int(a)
        if a != b:
            ia, ib = int(a), int(b)
            for idx, dv in ((ia, 1), (ib, -1)):
                before = diff[idx]
                diff[idx] += dv
                nz += (diff[idx] != 0) - (before != 0)
    return None


def _coincidence(seq, l_max, kind):
    if l_max < 1:
        raise ValueError("need l_max >= 1")
    d = seq.term(0).d
    for l in range(1, l_max + 1):
        if not seq.available(l - 1):
            return None
        imgs = [image_word(seq, 0, l, str(j)) for j in range(1, d + 1)]
        if kind == "negative_strong":
            imgs = [w[::-1] for w in imgs]
        pairs = []
        for j1, j2 in combinations(range(1, d + 1), 2):
            r = _pair_witness(imgs[j1 - 1], imgs[j2 - 1])
            if r is None:
                break
            pairs.append({"j1": j1, "j2": j2, "k": r[0], "i": r[1]})
        else:
            return CoincidenceWitness(kind, l, {"pairs": pairs, "terms": [
                list(s.images) for s in seq.terms(0, l)]}, str(seq))
    return None


def strong_coincidence(seq: DirectiveSequence, l_max: int) -> CoincidenceWitness | None:
    """Smallest l such that every pair of images sigma_[0,l)(j1), sigma_[0,l)(j2)
    has prefixes p1 i, p2 i with l(p1) = l(p2).  Detail: k = |p1| = |p2|."""
    return _coincidence(seq, l_max, "strong")


def negative_strong_coincidence(seq: DirectiveSequence, l_max: int) -> CoincidenceWitness | None:
    """Suffix version: i s1, i s2 suffixes with l(s1) = l(s2), k = |s1|."""
    return _coincidence(seq, l_max, "negative_strong")


# ---------------------------------------------------------------- geometric

def _frame(seq, n, u):
    m = product_matrix(seq, 0, n)
    w = tuple(sum(col) for col in zip(*m))              # tM 1, exact ints
    minv = inverse_unimodular(m)
    ut = np.array([[float(x) for x in r] for r in minv]) @ np.asarray(u, float)
    return m, w, ut


def gamma_faces_near(w, ut, centre, radius: float, budget: int) -> list[Face]:
    """All faces [y, j] of Gamma(w) (exact integer w) with
    ||pi_{ut,1}(y - centre)||_inf <= radius.

    Writing y - centre = q + s ut with q = pi(y - centre) in 1-perp,
    <w, y> in [0, max w) gives |s| <= (max w + |<w,centre>| + ||w||_1 radius) / <w, ut>,
    so ||y - centre||_inf <= radius + |s| ||ut||_inf; that box is enumerated exactly.
    """
    w = tuple(int(c) for c in w)
    ut = np.asarray(ut, float)
    centre = np.asarray(centre, float)
    wu = float(np.dot(w, ut))
    if wu <= 0:
        raise ValueError("need <w, u> > 0")
    h0 = float(np.dot(w, centre))
    span = (max(w) + sum(abs(c) for c in w) * radius + abs(h0)) * np.max(np.abs(ut)) / wu
    B = radius + span
    lo = np.floor(centre - B).astype(int)
    hi = np.ceil(centre + B).astype(int)
    sizes = hi - lo + 1
    # enumerate the two coordinates other than the heaviest; solve the third
    last = int(np.argmax(w))
    others = [k for k in range(3) if k != last]
    if int(sizes[others[0]]) * int(sizes[others[1]]) * 3 > budget:
        raise MemoryError(f"enumeration box {sizes.tolist()} exceeds face budget {budget}")
    out = []
    one = np.ones(3)
    wl = w[last]
    for a in range(lo[others[0]], hi[others[0]] + 1):
        for b in range(lo[others[1]], hi[others[1]] + 1):
            s = w[others[0]] * a + w[others[1]] * b
            for j in (1, 2, 3):
                # 0 <= s + wl t < w_j
                tlo = _ceil(-s, wl)
                thi = _ceil(w[j - 1] - s, wl) - 1
                for t in range(max(tlo, lo[last]), min(thi, hi[last]) + 1):
                    y = [0, 0, 0]
                    y[others[0]], y[others[1]], y[last] = a, b, t
                    out.append(Face(tuple(y), j))
    if not out:
        return []
    Y = np.array([f.x for f in out], float)
    P = project(ut, one, Y - centre)
    keep = np.max(np.abs(P), axis=1) <= radius + 1e-12
    return [f for f, k in zip(out, keep) if k]


def _ceil(a: int, b: int) -> int:
    return -((-a) // b)


def geometric_coincidence_check(seq: DirectiveSequence, n: int, C: float, u,
                                face_budget: int = 1_000_000,
                                certified: bool = False) -> CoincidenceWitness | None:
    """Search i and a centre z such that every face [y, j] of Gamma(tM_[0,n) 1) with
    ||pi_{M^{-1}u, 1}(y - z)|| <= C lies in E1*(sigma_[0,n))[0, i].

    Candidate centres are the base points of the faces of the dual patch and
    its centroid.  Among all valid (i, z) the lexicographically smallest is
    returned.  ``certified`` records whether C is a proven balance bound.
    """
    if C < 0:
        raise ValueError("need C >= 0")
    m, w, ut = _frame(seq, n, u)
    one = np.ones(3)
    best = None
    for i in (1, 2, 3):
        patch = dual_image_seq(seq, 0, n, [Face((0, 0, 0), i)])
        if not patch:
            continue
        base = np.array(sorted({f.x for f in patch}), float)
        cands = [tuple(x) for x in base] + [tuple(base.mean(axis=0))]
        # faces of Gamma(w) near the patch, not in it
        pp = project(ut, one, base)
        ctr = pp.mean(axis=0)
        R = float(np.max(np.abs(pp - ctr))) + C + 1.0
        near = gamma_faces_near(w, ut, np.array(base.mean(axis=0)), R, face_budget)
        bad = [f for f in near if f not in patch]
        bad_pts = project(ut, one, np.array([f.x for f in bad], float)) if bad else np.zeros((0, 3))
        tree = cKDTree(bad_pts) if len(bad) else None
        region_ok_r = R - C  # centres whose C-ball stays inside the enumerated region
        for z in sorted(set(cands)):
            pz = project(ut, one, np.array(z))
            if np.max(np.abs(pz - project(ut, one, base.mean(axis=0)))) > region_ok_r:
                continue
            if tree is not None:
                dist, _ = tree.query(pz, p=np.inf)
                if dist <= C + 1e-9:
                    continue
            key = (i, z)
            if best is None or key < best[0]:
                best = (key, patch)
            break  # smallest z for this i
        if best is not None:
            break
    if best is None:
        return None
    (i, z), patch = best
    ball = gamma_faces_near(w, ut, np.array(z), C, face_budget)
    if not all(f in patch for f in ball):
        return None  # cannot happen unless the region bound was violated
    detail = {"i": i, "z": list(map(float, z)), "C": C, "certified": certified,
              "u": [float(x) for x in u], "w": [str(c) for c in w],
              "ball": [list(f.x) + [f.i] for f in sorted(ball)], "patch_size": len(patch)}
    return CoincidenceWitness("geometric", n, detail, str(seq))


def geometric_finiteness_check(seq: DirectiveSequence, n: int, R: float) -> bool:
    """hyperplane_patch(tM_[0,n) 1, R) contained in the union of E1*(sigma_[0,n))[0, i]."""
    if R < 0:
        raise ValueError("need R >= 0")
    m = product_matrix(seq, 0, n)
    w = tuple(sum(col) for col in zip(*m))
    union = set()
    for i in (1, 2, 3):
        union |= dual_image_seq(seq, 0, n, [Face((0, 0, 0), i)])
    return hyperplane_patch(w, R) <= union


# ---------------------------------------------------------------- verification

def verify_witness(wit: CoincidenceWitness, seq: DirectiveSequence | None = None) -> bool:
    """Recompute a witness from scratch.  For strong kinds the stored
    substitution images suffice; geometric witnesses need the sequence."""
    from .words import Substitution, abelianize, compose_all
    if wit.kind in ("strong", "negative_strong"):
        subs = [Substitution(t) for t in wit.detail["terms"]]
        if len(subs) != wit.index:
            return False
        if seq is not None and seq.terms(0, wit.index) != subs:
            return False
        sig = compose_all(subs)
        d = sig.d
        seen = set()
        for p in wit.detail["pairs"]:
            w1, w2 = sig.image(p["j1"]), sig.image(p["j2"])
            if wit.kind == "negative_strong":
                w1, w2 = w1[::-1], w2[::-1]
            k, i = p["k"], p["i"]
            if k >= len(w1) or k >= len(w2):
                return False
            if abelianize(w1[:k], d) != abelianize(w2[:k], d):
                return False
            if int(w1[k]) != i or int(w2[k]) != i:
                return False
            seen.add((p["j1"], p["j2"]))
        return seen == set(combinations(range(1, d + 1), 2))
    if wit.kind == "geometric":
        if seq is None:
            raise ValueError("geometric witnesses need the directive sequence")
        n = wit.index
        det_ = wit.detail
        m, w, ut = _frame(seq, n, det_["u"])
        if [str(c) for c in w] != det_["w"]:
            return False
        patch = dual_image_seq(seq, 0, n, [Face((0, 0, 0), det_["i"])])
        ball = gamma_faces_near(w, ut, np.array(det_["z"]), det_["C"], 10 ** 7)
        stored = sorted(Face(tuple(b[:3]), b[3]) for b in det_["ball"])
        return sorted(ball) == stored and all(f in patch for f in ball) \
            and all(in_plane(w, f) for f in ball)
    if wit.kind == "finiteness":
        if seq is None:
            raise ValueError("finiteness witnesses need the directive sequence")
        return geometric_finiteness_check(seq, wit.index, wit.detail["R"])
    raise ValueError(f"unknown witness kind {wit.kind!r}")
