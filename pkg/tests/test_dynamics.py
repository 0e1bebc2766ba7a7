import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from sadic import cf
from sadic.directive import DirectiveSequence, limit_word_prefix
from sadic.dynamics import (CodingReport, bounded_remainder_stats, domain_exchange_step,
                            finest_covered, natural_coding_scan,
                            language_balance, natural_coding_check, recurrence_estimate,
                            torus_distance, torus_reduce, torus_translate, word_balance)
from sadic.fractal import cloud_from_word
from sadic.geometry import project
from sadic.spatial import GridIndex
from sadic.words import balance_constant, factors_of

ONE = np.ones(3)
plane = st.lists(st.floats(-3, 3), min_size=2, max_size=2).map(
    lambda v: np.array([v[0], v[1], -v[0] - v[1]]))


def test_torus_translate_examples():
    x = torus_reduce([0.3, 0.4, -0.7])
    assert np.allclose(torus_translate([0, 0, 0], x), x)
    assert np.allclose(torus_translate([-1, 0, 1], x), x)
    with pytest.raises(ValueError):
        torus_translate([1, 0, 0], x)


@given(plane, plane)
def test_torus_inverse(t, x):
    x = torus_reduce(x)
    y = torus_translate(-t, torus_translate(t, x))
    assert torus_distance(x, y) < 1e-9


@given(plane)
def test_torus_reduce_canonical(x):
    r = torus_reduce(x)
    assert np.all((r[:2] >= 0) & (r[:2] < 1))
    assert abs(r.sum()) < 1e-12
    assert torus_distance(r, x) < 1e-9


def test_domain_exchange_examples(tribonacci, tribonacci_u):
    word = limit_word_prefix(tribonacci, 40, 3000)
    cloud = cloud_from_word(word, tribonacci_u, ONE)
    i, y = domain_exchange_step(cloud, tribonacci_u, cloud.points[5], 1e-9)
    assert i == cloud.labels[5]
    assert np.allclose(y, cloud.points[6], atol=1e-12)
    assert domain_exchange_step(cloud, tribonacci_u, [5.0, 5.0, -10.0], 1e-9) is None


def test_domain_exchange_telescopes(tribonacci, tribonacci_u):
    """Following the steps from 0 reproduces the word at every unambiguous step."""
    word = limit_word_prefix(tribonacci, 40, 20_000)
    cloud = cloud_from_word(word, tribonacci_u, ONE)
    index = GridIndex(cloud.points, 1e-6, cloud.labels)
    x = np.zeros(3)
    steps = 0
    for n in range(2000):
        r = domain_exchange_step(cloud, tribonacci_u, x, 1e-9, index=index)
        assert r is not None
        assert r[0] == int(word[n])
        x = r[1]
        steps += 1
    assert steps == 2000


def test_natural_coding_empty(tribonacci, tribonacci_u):
    rep = natural_coding_check(tribonacci, 40, tribonacci_u, np.zeros(3), 0, 0.02)
    assert (rep.matched, rep.ambiguous, rep.mismatched, rep.N) == (0, 0, 0, 0)


def test_natural_coding_tribonacci(tribonacci, tribonacci_u):
    t = project(tribonacci_u, ONE, [0, 0, 1])
    rep = natural_coding_check(tribonacci, 60, tribonacci_u, t, 2000, 0.02)
    assert rep.mismatched == 0
    assert rep.matched + rep.ambiguous == 2000
    assert rep.matched >= 1600
    assert CodingReport(**__import__("json").loads(rep.to_json())) == rep


def test_natural_coding_brun_no_mismatch():
    p = cf.sample_invariant(5, 2024)[1]
    s = DirectiveSequence.brun(tuple(p))
    u = cf.brun_frequency(p)
    t = project(u, ONE, [0, 0, 1])
    reps = [natural_coding_check(s, 400, u, t, 1000, eps) for eps in (0.02, 0.005)]
    assert all(r.mismatched == 0 for r in reps)
    # ambiguity shrinks with eps (monitored trend)
    assert reps[1].ambiguous <= reps[0].ambiguous


def test_discrepancy_examples():
    w = "123" * 400
    d = bounded_remainder_stats(w, [1 / 3] * 3, 1200)
    assert np.all(d <= 2 / 3 + 1e-12)
    with pytest.raises(ValueError):
        bounded_remainder_stats("12", [0.5, 0.5, 0], 5)


@given(st.text(alphabet="123", min_size=1, max_size=300))
def test_discrepancy_at_horizon(w):
    N = len(w)
    freq = np.array([w.count(c) for c in "123"]) / N
    a = np.array([[w[:n].count(c) for c in "123"] for n in range(N + 1)])
    d = bounded_remainder_stats(w, freq, N)
    assert np.allclose(d, np.max(np.abs(a - np.arange(N + 1)[:, None] * freq), axis=0))
    assert abs(a[-1] - N * freq).max() <= 1e-9


def test_discrepancy_below_balance(tribonacci, tribonacci_u):
    word = limit_word_prefix(tribonacci, 60, 10_000)
    d = bounded_remainder_stats(word, tribonacci_u, 10_000)
    assert np.max(d) <= word_balance(word, 200)


@given(st.text(alphabet="123", min_size=1, max_size=80), st.integers(1, 12))
def test_word_balance_matches_oracle(w, L):
    assert word_balance(w, L) == oracles.balance(oracles.factors(w, L))
    assert word_balance(w, L) == balance_constant(factors_of([w], L))


def test_language_balance_union():
    assert language_balance(["1111", "2222"], 3) == 3
    assert language_balance(["123123"], 3) == word_balance("123123", 3)


def test_recurrence_examples():
    r = recurrence_estimate("123" * 50, 4)
    assert r.values[0] == (1, 3)
    vals = [v for _, v in r.values]
    assert vals == sorted(vals)


@given(st.text(alphabet="12", min_size=4, max_size=40), st.integers(1, 3))
def test_recurrence_matches_oracle(w, n):
    r = recurrence_estimate(w, n)
    got, want = r.values[-1][1], oracles.recurrence(w, n)
    # the tail after a factor's last occurrence is not counted; such n are flagged
    if n in r.insufficient:
        assert got <= want
    else:
        assert got == want


def test_recurrence_monotone_and_linear():
    s = DirectiveSequence.random(cf.ar_substitutions(), seed=3, max_run=2)
    word = limit_word_prefix(s, 200, 30_000)
    r = recurrence_estimate(word, 50)
    vals = [v for _, v in r.values]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    ratio = [v / n for n, v in r.values]
    # linear recurrence: R(n)/n does not grow between scales
    assert max(ratio[25:]) <= max(ratio[:25])


def test_natural_coding_scan(tribonacci, tribonacci_u):
    t = project(tribonacci_u, ONE, [0, 0, 1])
    reps = natural_coding_scan(tribonacci, 60, tribonacci_u, t, 500, [0.001, 0.02, 0.005])
    assert [r.epsilon for r in reps] == [0.02, 0.005, 0.001]
    for r in reps:
        assert r.ambiguous == r.uncovered + r.conflicting
        assert r.matched + r.ambiguous + r.mismatched == 500
    single = natural_coding_check(tribonacci, 60, tribonacci_u, t, 500, 0.005)
    assert (single.matched, single.ambiguous) == (reps[1].matched, reps[1].ambiguous)
    best = finest_covered(reps)
    assert best.uncovered == 0
    assert all(r.uncovered > 0 for r in reps if r.epsilon < best.epsilon)
