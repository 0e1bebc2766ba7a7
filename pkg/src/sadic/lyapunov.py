"""Lyapunov exponents of substitution cocycles and the Pisot condition.

For a matrix sequence M_0, M_1, ... the estimator carries

    v  <- tM_k v             theta_1
    b  <- wedge2(tM_k) b     theta_1 + theta_2
    z  <- M_k^{-1} z         -theta_3

with sup-norm renormalization every step (the last line follows from
(tM_{n-1} ... tM_0)^{-T} = M_{n-1}^{-1} ... M_0^{-1}).  theta_3 is therefore
estimated independently of theta_1 + theta_2, and theta_1 + theta_2 + theta_3
(zero for unimodular cocycles) is a genuine consistency check.
``form="product"`` instead carries the matrix products P <- P M_k and
Q <- Q wedge2(M_k), i.e. uses ||M_[0,n)|| directly.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy import stats

from . import cf, kernels
from .words import Matrix, inverse_unimodular, transpose


def wedge2(m: Matrix) -> Matrix:
    """Second exterior power in the basis e1^e2, e1^e3, e2^e3."""
    if len(m) != 3:
        raise ValueError("wedge2 implemented for d = 3 only")
    pairs = ((0, 1), (0, 2), (1, 2))
    return tuple(tuple(m[a][c] * m[b][e] - m[a][e] * m[b][c] for (c, e) in pairs)
                 for (a, b) in pairs)


class MatrixSampler:
    """Source of index sequences into a fixed list of matrices."""

    def __init__(self, matrices: Sequence[Matrix], name: str = "custom"):
        self.matrices = [tuple(tuple(int(x) for x in row) for row in m) for m in matrices]
        self.name = name

    def indices(self, n: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError


class IIDSampler(MatrixSampler):
    def __init__(self, matrices, probs=None, name="iid"):
        super().__init__(matrices, name)
        self.probs = None if probs is None else np.asarray(probs, float)

    def indices(self, n, rng):
        return rng.choice(len(self.matrices), size=n, p=self.probs).astype(np.int64)


class PeriodicSampler(MatrixSampler):
    def __init__(self, matrices, name="periodic"):
        super().__init__(matrices, name)

    def indices(self, n, rng):
        return (np.arange(n) % len(self.matrices)).astype(np.int64)


class BrunSampler(MatrixSampler):
    """Brun matrices along a Brun orbit started from the invariant density.
    If the floating-point orbit lands on x2 = 0 a fresh start is drawn."""

    def __init__(self):
        super().__init__(cf.BRUN_MATRICES, "brun")

    def indices(self, n, rng):
        out = []
        got = 0
        while got < n:
            x1, x2 = cf.sample_invariant(1, rng)[0]
            digits, _, _ = kernels.brun_digits(float(x1), float(x2), n - got)
            out.append(np.asarray(digits, dtype=np.int64) - 1)
            got += len(digits)
        return np.concatenate(out)


def ar_iid_sampler() -> IIDSampler:
    return IIDSampler([s.matrix for s in cf.ar_substitutions()], name="ar-iid")


def _float_stack(ms) -> np.ndarray:
    return np.ascontiguousarray(np.array([[[float(x) for x in r] for r in m] for m in ms]))


@dataclass
class LyapunovReport:
    theta1: float
    theta1_se: float
    theta2: float
    theta2_se: float
    theta_sum: float
    theta_sum_se: float
    n_steps: int
    trials: int
    seed: int
    sampler: str = ""
    form: str = "vector"
    confidence: float = 0.95
    theta1_ci: tuple[float, float] = (0.0, 0.0)
    theta2_ci: tuple[float, float] = (0.0, 0.0)
    per_trial: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def _ci(x: np.ndarray, level: float):
    m = float(np.mean(x))
    if len(x) < 2:
        return m, float("nan"), (m, m)
    se = float(np.std(x, ddof=1) / math.sqrt(len(x)))
    q = float(stats.t.ppf(0.5 + level / 2, len(x) - 1))
    return m, se, (m - q * se, m + q * se)


def lyapunov_estimate(sampler: MatrixSampler, n_steps: int, trials: int, seed: int,
                      burn_in: int = 100, form: str = "vector", backend=None) -> LyapunovReport:
    """theta_1, theta_2 and theta_1+theta_2+theta_3 of the transposed cocycle.

    Each trial uses its own stream from SeedSequence(seed).spawn(trials) and
    averages over n_steps steps after burn_in alignment steps.
    """
    if trials < 1 or n_steps < 1:
        raise ValueError("need trials >= 1 and n_steps >= 1")
    impl = backend or kernels
    ms = sampler.matrices
    T = _float_stack([transpose(m) for m in ms])
    W_T = _float_stack([wedge2(transpose(m)) for m in ms])
    Inv = _float_stack([inverse_unimodular(m) for m in ms])
    M = _float_stack(ms)
    W = _float_stack([wedge2(m) for m in ms])
    t1, t12, t3 = [], [], []
    for child in np.random.SeedSequence(seed).spawn(trials):
        rng = np.random.default_rng(child)
        idx = np.ascontiguousarray(sampler.indices(burn_in + n_steps, rng), dtype=np.int64)
        if len(idx) < burn_in + n_steps:
            raise RuntimeError("sampler exhausted")
        if form == "vector":
            g1 = impl.vec_log_growth(idx, T, np.ones(3), burn_in)
            g12 = impl.vec_log_growth(idx, W_T, np.ones(3), burn_in)
        elif form == "product":
            g1 = impl.mat_log_growth(idx, M, True, burn_in)
            g12 = impl.mat_log_growth(idx, W, True, burn_in)
        else:
            raise ValueError("form must be 'vector' or 'product'")
        g3 = impl.vec_log_growth(idx, Inv, np.ones(3), burn_in)
        t1.append(g1 / n_steps)
        t12.append(g12 / n_steps)
        t3.append(-g3 / n_steps)
    t1, t12, t3 = map(np.array, (t1, t12, t3))
    m1, s1, c1 = _ci(t1, 0.95)
    m2, s2, c2 = _ci(t12 - t1, 0.95)
    ms_, ss, _ = _ci(t12 + t3, 0.95)
    return LyapunovReport(m1, s1, m2, s2, ms_, ss, n_steps, trials, seed, sampler.name, form,
                          0.95, c1, c2,
                          {"theta1": t1.tolist(), "theta12": t12.tolist(), "theta3": t3.tolist()})


@dataclass
class PisotVerdict:
    holds: bool
    confidence: float
    theta1_ci: tuple[float, float]
    theta2_ci: tuple[float, float]

    def __bool__(self):
        return self.holds


def pisot_condition(report: LyapunovReport) -> PisotVerdict:
    """theta_1 > 0 > theta_2 at the report's confidence level."""
    lo1, _ = report.theta1_ci
    _, hi2 = report.theta2_ci
    ok = bool(lo1 > 0 and hi2 < 0) and not (math.isnan(lo1) or math.isnan(hi2))
    return PisotVerdict(ok, report.confidence, report.theta1_ci, report.theta2_ci)
