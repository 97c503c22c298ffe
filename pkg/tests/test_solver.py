"""Critical-point solver, scans, convexity margin, ray map."""

import math
import warnings

import numpy as np
import pytest
from numpy.testing import assert_allclose

from acwillmore import (DomainError, HypothesisViolation, com_compare,
                        convexity_check, fd_hessian, find_critical_point,
                        make_model, offset_sphere_moment, ray_map,
                        stationary_scan, trace_branch)

PI = math.pi
E3 = np.array([0.0, 0.0, 1.0])


# ---------------------------------------------------------------------------
# hessian


def test_fd_hessian_at_origin():
    # vacuum model: the reduced energy is the explicit part alone, whose
    # Hessian at the origin is 256 pi times the identity
    m = make_model("schwarzschild")
    h, asym = fd_hessian(m, np.zeros(3), 100.0)
    assert_allclose(h, 256.0 * PI * np.eye(3), rtol=1e-5, atol=1e-6)
    assert asym < 1e-10


def test_fd_hessian_off_origin_symmetry():
    m = make_model("schwarzschild")
    h, asym = fd_hessian(m, 0.4 * E3, 100.0)
    assert_allclose(h, h.T)
    # radial direction stiffens, transverse stays near 256 pi
    assert h[2, 2] > h[0, 0]
    assert asym < 1e-9


# ---------------------------------------------------------------------------
# critical points


def test_find_critical_point_vacuum():
    m = make_model("schwarzschild")
    cp = find_critical_point(m, 50.0)
    assert cp.classification == "min"
    assert np.linalg.norm(cp.xi) < 1e-10
    assert cp.grad_norm < 1e-6
    assert_allclose(cp.hessian_eigenvalues, 256.0 * PI, rtol=1e-4)
    assert_allclose(cp.barycenter, 50.0 * cp.xi)
    assert cp.rho + cp.theta == pytest.approx(2.0 * 50.0)


def test_find_critical_point_delta_domain():
    m = make_model("schwarzschild")
    with pytest.raises(DomainError):
        find_critical_point(m, 50.0, delta=0.6)


def test_trace_branch_vacuum():
    m = make_model("schwarzschild")
    tr = trace_branch(m, (40.0, 80.0))
    assert len(tr.points) == 2
    assert tr.points[0][0] == 40.0
    assert np.all(tr.oscillation < 1e-8)
    with pytest.raises(DomainError):
        trace_branch(m, (80.0, 40.0))


def test_stationary_scan_vacuum():
    m = make_model("schwarzschild")
    res = stationary_scan(m, 40.0, spacing=0.3)
    # lattice points of spacing 0.3 inside the radius-0.75 ball
    assert res.n_points == 81
    assert_allclose(res.grid_argmin, np.zeros(3))
    assert res.min_grad_norm < 1e-6
    assert res.min_grad_norm <= res.grid_min_grad_norm


def test_com_compare_vacuum():
    m = make_model("schwarzschild")
    cmp_ = com_compare(m, 50.0)
    assert np.linalg.norm(cmp_.residual) < 1e-6
    assert np.linalg.norm(cmp_.curvature_term) == 0.0


# ---------------------------------------------------------------------------
# convexity margin


def test_convexity_margin_matches_moment_difference():
    # for f = |x|**-4 the two weighted fluxes reduce to the order-4
    # moment at the two offsets, scaled by lam**-2 and the axial overlap
    lam = 10.0

    def f(pts):
        return np.linalg.norm(pts, axis=1) ** -4.0

    with warnings.catch_warnings():
        warnings.simplefilter("error")
        margin = convexity_check(f, 0.2 * E3, 0.5 * E3, lam)
    expect = 0.3 * (offset_sphere_moment(4, 0.2)
                    - offset_sphere_moment(4, 0.5)) / lam ** 2
    assert margin == pytest.approx(expect, rel=1e-8)
    assert margin > 0.0


def test_convexity_margin_from_center():
    lam = 10.0

    def f(pts):
        return np.linalg.norm(pts, axis=1) ** -4.0

    margin = convexity_check(f, np.zeros(3), 0.5 * E3, lam)
    expect = -0.5 * offset_sphere_moment(4, 0.5) / lam ** 2
    assert margin == pytest.approx(expect, rel=1e-8)


def test_convexity_hypothesis_violations_warn():
    def increasing(pts):
        return np.linalg.norm(pts, axis=1) ** 2

    with pytest.warns(HypothesisViolation):
        convexity_check(increasing, 0.1 * E3, 0.3 * E3, 5.0)

    def negative(pts):
        return -np.ones(len(pts))

    with pytest.warns(HypothesisViolation):
        convexity_check(negative, 0.1 * E3, 0.3 * E3, 5.0)


def test_convexity_domain():
    with pytest.raises(DomainError):
        convexity_check(lambda p: np.ones(len(p)), np.zeros(3), 1.0 * E3, 5.0)


# ---------------------------------------------------------------------------
# ray map


def test_ray_map_right_angle():
    theta, t = ray_map(0.5 * PI, np.zeros(3), 0.5 * E3)
    assert theta == pytest.approx(math.atan(2.0), abs=1e-12)
    assert t == pytest.approx(0.5 * math.sqrt(5.0), rel=1e-12)


def test_ray_map_residual_sweep():
    rng = np.random.default_rng(2718)
    for _ in range(50):
        xi1 = rng.normal(size=3)
        xi1 *= rng.uniform(0.0, 0.6) / np.linalg.norm(xi1)
        xi2 = rng.normal(size=3)
        xi2 *= rng.uniform(0.05, 0.9) / np.linalg.norm(xi2)
        if np.linalg.norm(xi2 - xi1) < 1e-3:
            continue
        zeta = rng.uniform(0.1, PI - 0.1)
        theta, t = ray_map(zeta, xi1, xi2)
        axis = (xi2 - xi1) / np.linalg.norm(xi2 - xi1)
        a, b = float(xi1 @ axis), float(xi2 @ axis)
        resid = math.sin(zeta) * (math.cos(theta) + a) \
            - math.sin(theta) * (math.cos(zeta) + b)
        assert abs(resid) < 1e-12
        assert 0.0 < theta <= zeta
        assert t == pytest.approx(math.sin(zeta) / math.sin(theta), rel=1e-12)


def test_ray_map_domain():
    with pytest.raises(DomainError):
        ray_map(0.0, np.zeros(3), 0.5 * E3)
    with pytest.raises(DomainError):
        ray_map(1.0, np.zeros(3), 1.2 * E3)
    with pytest.raises(DomainError):
        ray_map(1.0, 0.3 * E3, 0.3 * E3)
