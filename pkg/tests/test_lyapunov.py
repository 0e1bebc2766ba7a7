import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from sadic import cf
from sadic.lyapunov import (BrunSampler, IIDSampler, MatrixSampler, PeriodicSampler,
                            ar_iid_sampler, lyapunov_estimate, pisot_condition, wedge2)
from sadic.words import mat_identity, mat_mul, transpose

A = [s.matrix for s in cf.ar_substitutions()]
B = [s.matrix for s in cf.brun_substitutions()]


def test_wedge2_examples():
    assert wedge2(mat_identity(3)) == mat_identity(3)
    assert wedge2(((1, 0, 0), (0, 1, 0), (0, 1, 1))) == ((1, 0, 0), (1, 1, 0), (0, 0, 1))


@given(st.lists(st.sampled_from(B + A), min_size=1, max_size=6))
def test_wedge2_multiplicative(ms):
    prod = ms[0]
    for m in ms[1:]:
        prod = mat_mul(prod, m)
    w = wedge2(ms[0])
    for m in ms[1:]:
        w = mat_mul(w, wedge2(m))
    assert w == wedge2(prod)
    assert [list(r) for r in wedge2(prod)] == oracles.wedge2(prod)


def test_identity_cocycle():
    rep = lyapunov_estimate(IIDSampler([mat_identity(3)], name="id"), 1000, 3, seed=0)
    assert rep.theta1 == 0 and rep.theta2 == 0
    assert not pisot_condition(rep)


def test_periodic_cocycle_matches_eigenvalue():
    prod = np.array(mat_mul(mat_mul(A[0], A[1]), A[2]), float)
    lam = max(abs(np.linalg.eigvals(prod)))
    rep = lyapunov_estimate(PeriodicSampler(A), 30_000, 1, seed=0, burn_in=99)
    assert rep.theta1 == pytest.approx(math.log(lam) / 3, abs=1e-6)
    rep_p = lyapunov_estimate(PeriodicSampler(A), 30_000, 1, seed=0, burn_in=99, form="product")
    assert rep_p.theta1 == pytest.approx(math.log(lam) / 3, abs=1e-6)


@pytest.fixture(scope="module")
def brun_report():
    return lyapunov_estimate(BrunSampler(), 20_000, 10, seed=3)


def test_brun_pisot(brun_report):
    assert brun_report.theta1 > 0 > brun_report.theta2
    assert pisot_condition(brun_report)
    assert abs(brun_report.theta_sum) < 3 * brun_report.theta_sum_se + 1e-12


def test_ar_pisot():
    rep = lyapunov_estimate(ar_iid_sampler(), 20_000, 10, seed=4)
    v = pisot_condition(rep)
    assert v and v.confidence == 0.95
    assert abs(rep.theta_sum) < 3 * rep.theta_sum_se + 1e-12


def test_transpose_invariance():
    """Running on transposed matrices changes theta by < 3 SE."""
    rep = lyapunov_estimate(ar_iid_sampler(), 20_000, 10, seed=5)
    tr = lyapunov_estimate(IIDSampler([transpose(m) for m in A]), 20_000, 10, seed=5)
    assert abs(rep.theta1 - tr.theta1) < 3 * math.hypot(rep.theta1_se, tr.theta1_se)
    assert abs(rep.theta2 - tr.theta2) < 3 * math.hypot(rep.theta2_se, tr.theta2_se)


def test_vector_and_product_forms_agree():
    a = lyapunov_estimate(ar_iid_sampler(), 20_000, 5, seed=9)
    b = lyapunov_estimate(ar_iid_sampler(), 20_000, 5, seed=9, form="product")
    assert a.theta1 == pytest.approx(b.theta1, abs=1e-3)
    assert a.theta2 == pytest.approx(b.theta2, abs=1e-3)


def test_reproducible_and_json(brun_report):
    again = lyapunov_estimate(BrunSampler(), 20_000, 10, seed=3)
    assert again.to_json() == brun_report.to_json()
    o = json.loads(brun_report.to_json())
    for key in ("n_steps", "trials", "seed", "sampler", "form", "confidence"):
        assert key in o


def test_errors():
    with pytest.raises(ValueError):
        lyapunov_estimate(ar_iid_sampler(), 100, 0, seed=1)
    with pytest.raises(ValueError):
        lyapunov_estimate(ar_iid_sampler(), 100, 2, seed=1, form="bogus")
    with pytest.raises(NotImplementedError):
        MatrixSampler(A).indices(3, np.random.default_rng(0))
