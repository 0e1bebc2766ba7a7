"""Compiled and pure-Python kernels must agree; both are checked against
straightforward numpy / scipy references."""
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial import cKDTree

import oracles
from sadic import cf, kernels
from sadic.kernels import _pykernels as py
from sadic.lyapunov import _float_stack
from sadic.spatial import GridIndex

try:
    from sadic.kernels import _ckernels as cy
except ImportError:          # pragma: no cover
    cy = None

BACKENDS = [py] + ([cy] if cy is not None else [])
needs_cy = pytest.mark.skipif(cy is None, reason="compiled extension not built")


def test_backend_selection():
    assert kernels.BACKEND in ("cython", "python")
    if cy is not None and kernels.compiled_backend is not None:
        assert kernels.vec_log_growth is cy.vec_log_growth


@pytest.mark.parametrize("impl", BACKENDS)
def test_vec_log_growth_reference(impl):
    rng = np.random.default_rng(0)
    idx = rng.integers(0, 3, 300).astype(np.int64)
    mats = _float_stack(cf.BRUN_MATRICES)
    g = impl.vec_log_growth(idx, mats, np.ones(3), 20)
    v = np.ones(3)
    for k in idx[:20]:
        v = mats[k] @ v
        v /= np.abs(v).max()
    acc = 0.0
    for k in idx[20:]:
        v = mats[k] @ v
        n = np.abs(v).max()
        acc += np.log(n)
        v /= n
    assert g == pytest.approx(acc, rel=1e-12)


@pytest.mark.parametrize("impl", BACKENDS)
def test_window_extrema_reference(impl):
    w = "1213121121312123"
    a = np.array([int(c) - 1 for c in w], dtype=np.uint8)
    mins, maxs = impl.window_extrema(a, 3, 6)
    for n in range(1, 7):
        counts = np.array([oracles.abelian(w[i:i + n]) for i in range(len(w) - n + 1)])
        assert mins[n - 1].tolist() == counts.min(axis=0).tolist()
        assert maxs[n - 1].tolist() == counts.max(axis=0).tolist()


@pytest.mark.parametrize("impl", BACKENDS)
def test_brun_digits_reference(impl):
    digits, x1, x2 = impl.brun_digits(0.3141, 0.5926, 25)
    e = cf.brun_expand((0.3141, 0.5926), 25)
    assert list(digits) == e.digits
    assert (x1, x2) == pytest.approx(e.point, rel=1e-9)


@needs_cy
@given(st.integers(0, 10 ** 6), st.integers(1, 400), st.integers(0, 50))
def test_log_growth_parity(seed, n, burn):
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, 3, n + burn).astype(np.int64)
    mats = _float_stack(cf.BRUN_MATRICES)
    assert cy.vec_log_growth(idx, mats, np.ones(3), burn) == pytest.approx(
        py.vec_log_growth(idx, mats, np.ones(3), burn), rel=1e-12, abs=1e-12)
    for right in (True, False):
        assert cy.mat_log_growth(idx, mats, right, burn) == pytest.approx(
            py.mat_log_growth(idx, mats, right, burn), rel=1e-12, abs=1e-12)


@needs_cy
@given(st.text(alphabet="123", min_size=1, max_size=200), st.integers(1, 40))
def test_window_extrema_parity(w, L):
    a = np.array([int(c) - 1 for c in w], dtype=np.uint8)
    for x, y in zip(cy.window_extrema(a, 3, L), py.window_extrema(a, 3, L)):
        assert np.array_equal(np.asarray(x), np.asarray(y))


@needs_cy
@given(st.floats(0.001, 0.999), st.floats(0.001, 0.999), st.integers(0, 60))
def test_brun_digits_parity(a, b, n):
    x1, x2 = min(a, b), max(a, b)
    dc, c1, c2 = cy.brun_digits(x1, x2, n)
    dp, p1, p2 = py.brun_digits(x1, x2, n)
    assert list(dc) == list(dp) and (c1, c2) == (p1, p2)


@given(st.integers(0, 10 ** 6), st.floats(0.01, 0.3))
def test_grid_query_matches_kdtree(seed, eps):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1, 1, (400, 3))
    labels = rng.integers(1, 4, 400)
    q = np.concatenate([rng.uniform(-1.2, 1.2, (100, 3)), pts[:20]])
    g = GridIndex(pts, eps, labels)
    tree = cKDTree(pts)
    near = tree.query_ball_point(q, eps, p=np.inf)
    want_c = [len(r) for r in near]
    want_m = [int(np.bitwise_or.reduce(1 << labels[r])) if r else 0 for r in near]
    for impl in BACKENDS:
        assert g.count(q, eps, backend=impl).tolist() == want_c
        assert g.label_mask(q, eps, backend=impl).tolist() == want_m


def test_grid_index_edge_cases():
    g = GridIndex(np.zeros((0, 3)), 0.1)
    assert g.count(np.zeros((2, 3)), 0.1).tolist() == [0, 0]
    g = GridIndex(np.zeros((3, 3)), 0.1)
    with pytest.raises(ValueError):
        g.count(np.zeros((1, 3)), 0.2)
    with pytest.raises(ValueError):
        GridIndex(np.zeros((3, 2)), 0.1)
