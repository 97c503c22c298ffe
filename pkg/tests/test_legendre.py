"""Legendre recurrence, truncation certificates, and series operations."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from acwillmore import (DomainError, NonConvergenceError, SeriesTruncation,
                        graph_profile, lagrange_multiplier_estimate,
                        legendre_eval, legendre_table,
                        willmore_operator_sphere)

E3 = np.array([0.0, 0.0, 1.0])


def test_table_endpoints():
    # P_l(1) = 1, P_l(-1) = (-1)**l
    assert_allclose(legendre_table(12, np.asarray(1.0)), np.ones(13),
                    rtol=0, atol=1e-14)
    assert_allclose(legendre_table(12, np.asarray(-1.0)),
                    [(-1.0) ** l for l in range(13)], rtol=0, atol=1e-14)


def test_table_low_degrees():
    s = 0.37
    table = legendre_table(3, np.asarray(s))
    assert_allclose(table[2], 0.5 * (3 * s * s - 1))
    assert_allclose(table[3], 0.5 * (5 * s ** 3 - 3 * s))


def test_eval_matches_table_batch():
    rng = np.random.default_rng(91)
    s = rng.uniform(-1.0, 1.0, size=40)
    table = legendre_table(8, s)
    for l in (0, 3, 8):
        assert_allclose(table[l], legendre_eval(l, s), rtol=1e-14)
    assert isinstance(legendre_eval(5, 0.25), float)


def test_eval_bounded_on_interval():
    rng = np.random.default_rng(7)
    s = rng.uniform(-1.0, 1.0, size=200)
    for l in (1, 5, 17, 40):
        assert np.all(np.abs(legendre_eval(l, s)) <= 1.0 + 1e-12)


def test_orthogonality_on_gauss_grid():
    nodes, weights = np.polynomial.legendre.leggauss(24)
    table = legendre_table(10, nodes)
    gram = (table * weights) @ table.T
    expect = np.diag([2.0 / (2 * l + 1) for l in range(11)])
    assert_allclose(gram, expect, rtol=0, atol=1e-13)


def test_eval_rejects_bad_argument():
    with pytest.raises(DomainError):
        legendre_eval(3, 1.5)
    # round-off excursions are clamped, not fatal
    assert legendre_eval(3, 1.0 + 1e-13) == pytest.approx(1.0)


def test_graph_profile_at_origin_and_axis():
    # at xi = 0 only the constant survives
    assert graph_profile(np.zeros(3), 0.3) == -2.0
    # s = 1 collapses to -2 + 4 (-log(1-t) - t); at t = 1/2 this is
    # 4 log 2 - 4, an exact closed form
    # tolerance matches the default tail certificate, not machine epsilon
    val = graph_profile(0.5 * E3, 1.0)
    assert_allclose(val, 4.0 * np.log(2.0) - 4.0, rtol=0, atol=1e-10)


def test_graph_profile_goldens():
    # independent 40-digit evaluations of the generating-function form
    # -2 + 4 [log(2 / (1 - t s + sqrt(1 - 2 t s + t^2))) - t s]
    assert_allclose(graph_profile(0.5 * E3, 0.25),
                    -2.241845915449715313308, rtol=0, atol=5e-10)
    deep = SeriesTruncation(max_degree=240, tail_tolerance=1e-13)
    assert_allclose(graph_profile(0.8 * E3, -0.3, deep),
                    -2.234520657922660183391, rtol=0, atol=5e-13)


def test_graph_profile_rotation_covariance():
    rng = np.random.default_rng(23)
    for _ in range(5):
        v = rng.normal(size=3)
        v *= 0.6 / np.linalg.norm(v)
        s = rng.uniform(-1.0, 1.0)
        assert graph_profile(v, s) == pytest.approx(
            graph_profile(0.6 * E3, s), rel=1e-13)


def test_graph_profile_truncation_failure():
    # the default degree-60 policy cannot certify the tail at |xi| = 0.8
    with pytest.raises(NonConvergenceError):
        graph_profile(0.8 * E3, -0.3)
    with pytest.raises(DomainError):
        graph_profile(1.01 * E3, 0.0)


def test_willmore_operator_centered_sphere():
    # at xi = 0 only l = 0 contributes: 4 lam^-4 (-1)(1)(2) = -8 lam^-4
    assert willmore_operator_sphere(np.zeros(3), 10.0, 0.77) == \
        pytest.approx(-8.0e-4)
    assert willmore_operator_sphere(np.zeros(3), 100.0, -0.2) == \
        pytest.approx(-8.0e-8)


def test_willmore_operator_degree_one_absent():
    # the l = 1 coefficient (l-1)(l+1)(l+2) vanishes: the value at small t
    # differs from the centered value at second order only
    lam = 50.0
    base = willmore_operator_sphere(np.zeros(3), lam, 1.0)
    t = 1e-5
    val = willmore_operator_sphere(t * E3, lam, 1.0)
    # l = 2 term: 1*3*4 t^2 P_2(1) * 4 lam^-4
    assert val - base == pytest.approx(48.0 * t * t / lam ** 4, rel=1e-4)


def test_willmore_operator_partial_sums():
    # direct partial sum with an explicit table, same truncation degree
    t, s, lam = 0.45, 0.3, 20.0
    val = willmore_operator_sphere(t * E3, lam, s)
    # reproduce with a generous fixed degree; tail is far below 1e-12
    table = legendre_table(120, np.asarray(s))
    acc = sum((l - 1) * (l + 1) * (l + 2) * t ** l * float(table[l])
              for l in range(121))
    assert_allclose(val, 4.0 * lam ** -4 * acc, rtol=1e-10)


def test_lagrange_multiplier_estimate():
    assert lagrange_multiplier_estimate(10.0) == pytest.approx(4.0e-3)
    assert lagrange_multiplier_estimate(1.0e3) == pytest.approx(4.0e-9)
    with pytest.raises(DomainError):
        lagrange_multiplier_estimate(0.0)
