import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from sadic import cf
from sadic.directive import TOKENS, DirectiveSequence, product_matrix
from sadic.geometry import (Face, angle, dual_image, dual_image_patch, dual_image_seq,
                            eigen_residual, hyperplane_patch, in_plane, patch_from_csv,
                            patch_to_csv, project, recurrent_left_vector_approx,
                            right_eigenvector_approx, set_equation_decompose, vector_from_csv,
                            vector_to_csv)
from sadic.words import compose, compose_all, identity, mat_vec, transpose

A = cf.ar_substitutions()
B = cf.brun_substitutions()
ALL = list(TOKENS.values())
TABLES = {"a": oracles.AR, "b": oracles.BRUN, "s": oracles.SIGMA_BR}
AB = list(A) + list(B)


def table(s):
    return TABLES[s.name[0]][int(s.name[1])]


def F(x, i):
    return Face(tuple(x), i)


def test_dual_image_examples():
    assert dual_image(A[0], F((0, 0, 0), 1)) == {F((0, 0, 0), 1), F((-1, 1, 0), 2), F((-1, 0, 1), 3)}
    assert dual_image(A[0], F((0, 0, 0), 2)) == {F((0, 0, 0), 2)}
    f = F((3, -1, 2), 2)
    assert dual_image(identity(), f) == {f}
    base = {F((0, 0, 0), i) for i in (1, 2, 3)}
    assert len(dual_image_patch(A[0], base)) == 5
    assert dual_image_patch(A[0], set()) == frozenset()


@given(st.sampled_from(ALL), st.lists(st.integers(-5, 5), min_size=3, max_size=3),
       st.integers(1, 3))
def test_dual_image_matches_definition(s, x, i):
    got = {(f.x, f.i) for f in dual_image(s, F(x, i))}
    assert got == oracles.dual_image(table(s), x, i)


def patches(max_faces=50):
    faces = sorted(hyperplane_patch((1, 1, 1), 4))
    return st.lists(st.sampled_from(faces), max_size=max_faces).map(frozenset)


@given(st.sampled_from(AB), st.sampled_from(AB), patches())
def test_contravariance(s, t, P):
    assert dual_image_patch(compose(s, t), P) == dual_image_patch(t, dual_image_patch(s, P))


@given(st.lists(st.sampled_from(AB), min_size=1, max_size=5),
       st.lists(st.integers(1, 6), min_size=3, max_size=3))
def test_dual_images_land_in_plane_and_are_disjoint(terms, w):
    sig = compose_all(terms)
    w2 = mat_vec(transpose(sig.matrix), w)
    seen = set()
    for f in hyperplane_patch(tuple(w), 2):
        img = dual_image(sig, f)
        assert all(in_plane(w2, g) for g in img)
        assert not (img & seen)
        seen |= img


def test_dual_image_seq_order():
    s = DirectiveSequence.parse("b3 a1 b2")
    P = hyperplane_patch((1, 1, 1), 1)
    direct = dual_image_patch(s.term(2), dual_image_patch(s.term(1), dual_image_patch(s.term(0), P)))
    assert dual_image_seq(s, 0, 3, P) == direct
    assert dual_image_seq(s, 0, 3, P) == dual_image_patch(compose_all(s.terms(0, 3)), P)


def test_hyperplane_patch_examples():
    assert hyperplane_patch((1, 1, 1), 0) == {F((0, 0, 0), i) for i in (1, 2, 3)}
    p = hyperplane_patch((1, 0, 0), 1)
    assert p and all(f.i == 1 and f.x[0] == 0 for f in p)
    with pytest.raises(ValueError):
        hyperplane_patch((0, 0, 0), 1)


@given(st.lists(st.integers(1, 9), min_size=3, max_size=3), st.integers(0, 4))
def test_hyperplane_patch_matches_brute_force(w, r):
    brute = {F((a, b, c), i) for a in range(-r, r + 1) for b in range(-r, r + 1)
             for c in range(-r, r + 1) for i in (1, 2, 3) if oracles.in_gamma(w, (a, b, c), i)}
    assert hyperplane_patch(tuple(w), r) == brute


def test_hyperplane_patch_growth():
    w = (1.0, 0.7548776662466927, 0.5698402909980532)
    rs = np.array([4, 8, 16, 32])
    n = np.array([len(hyperplane_patch(w, r)) for r in rs])
    slope = np.polyfit(np.log(rs), np.log(n), 1)[0]
    assert abs(slope - 2) < 0.15


def test_project_examples():
    one = np.ones(3)
    assert np.allclose(project(one, one, [1, 0, 0]), [2 / 3, -1 / 3, -1 / 3])
    assert np.allclose(project(one, one, [1, -1, 0]), [1, -1, 0])
    assert np.allclose(project(one, [0, 0, 1], [0, 0, 1]), [-1, -1, 0])
    with pytest.raises(ValueError):
        project([1, -1, 0], one, [1, 0, 0])


@given(st.lists(st.floats(0.1, 5), min_size=3, max_size=3),
       st.lists(st.floats(-5, 5), min_size=3, max_size=3),
       st.lists(st.floats(-5, 5), min_size=3, max_size=3))
def test_project_linear_idempotent(u, x, y):
    one = np.ones(3)
    px = project(u, one, x)
    assert abs(px.sum()) < 1e-9
    assert np.allclose(project(u, one, px), px, atol=1e-9)
    assert np.allclose(project(u, one, u), 0, atol=1e-9)
    assert np.allclose(project(u, one, np.add(x, y)), px + project(u, one, y), atol=1e-9)


def test_right_eigenvector():
    s = DirectiveSequence.periodic([B[2], B[1]])
    m = product_matrix(s, 0, 2)
    assert np.allclose(right_eigenvector_approx(s, 0), [1 / 3] * 3)
    lam, res = eigen_residual(m, right_eigenvector_approx(s, 44))
    ev = np.linalg.eigvals(np.array(m, float))
    assert lam == pytest.approx(max(ev.real), rel=1e-9)
    assert res < 1e-9


def test_right_eigenvector_cones_nest(tribonacci):
    us = [right_eigenvector_approx(tribonacci, n) for n in range(3, 60, 2)]
    ang = [angle(a, b) for a, b in zip(us, us[1:])]
    assert all(b <= a for a, b in zip(ang, ang[1:]))


def test_left_vector(tribonacci):
    assert np.allclose(recurrent_left_vector_approx(tribonacci, 0), [1 / 3] * 3)
    vs = [recurrent_left_vector_approx(tribonacci, n) for n in range(3, 33, 3)]
    assert angle(vs[-1], vs[-2]) < 1e-6
    # left power iteration oracle on the period matrix
    mt = np.array(product_matrix(tribonacci, 0, 3), float).T
    ev, vec = np.linalg.eig(mt)
    v = np.abs(vec[:, np.argmax(ev.real)].real)
    assert angle(vs[-1], v) < 1e-6
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        b1 = DirectiveSequence.periodic([B[0]])
        a = recurrent_left_vector_approx(b1, 200)
        b = recurrent_left_vector_approx(b1, 400)
    assert angle(a, b) < 1e-2


def test_strong_convergence(tribonacci, tribonacci_u):
    m = np.array(product_matrix(tribonacci, 0, 40), float)
    for i in range(3):
        assert np.max(np.abs(project(tribonacci_u, np.ones(3), m[:, i]))) < 1e-3


def test_set_equation_pieces(tribonacci, tribonacci_u):
    one = np.ones(3)
    pieces = set_equation_decompose(tribonacci, 0, 3, F((0, 0, 0), 1), tribonacci_u, one)
    assert len(pieces) == len(dual_image_seq(tribonacci, 0, 3, [F((0, 0, 0), 1)]))
    for off, _ in pieces:
        assert abs(off @ one) < 1e-9
    ident = DirectiveSequence.finite([identity()])
    (off, g), = set_equation_decompose(ident, 0, 1, F((0, 0, 0), 2), tribonacci_u, one)
    assert g == F((0, 0, 0), 2) and np.allclose(off, 0)


def test_patch_csv_roundtrip():
    P = hyperplane_patch((3, 2, 1), 3)
    assert patch_from_csv(patch_to_csv(P)) == P
    assert patch_to_csv(P) == patch_to_csv(set(P))
    v = np.array([0.1, 1 / 3, -2.5])
    assert np.array_equal(vector_from_csv(vector_to_csv(v)), v)
