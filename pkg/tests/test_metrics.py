"""Metric catalog: profiles, shells, conformal factors, curvature."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from acwillmore import (BumpProfile, GluedModel, OscillatorModel,
                        OutOfPlateauError, SchwarzschildModel,
                        ShellPerturbation, SingularityError, bump_eval,
                        make_model, mean_curvature_sphere, metric_deviation,
                        ricci_schwarzschild_leading, scalar_curvature,
                        shell_laplacian_closed_form)


def fd_grad(f, pts, h):
    # h may be scalar or per-point (steps should track the local scale)
    h = np.broadcast_to(np.asarray(h, dtype=float), (len(pts),))
    out = np.zeros((len(pts), 3))
    for i in range(3):
        e = np.zeros(3)
        e[i] = 1.0
        step = h[:, None] * e
        out[:, i] = (f(pts + step) - f(pts - step)) / (2.0 * h)
    return out


def fd_lap(f, pts, h):
    h = np.broadcast_to(np.asarray(h, dtype=float), (len(pts),))
    acc = -6.0 * np.asarray(f(pts))
    for i in range(3):
        e = np.zeros(3)
        e[i] = 1.0
        step = h[:, None] * e
        acc = acc + f(pts + step) + f(pts - step)
    return acc / h ** 2


# ---------------------------------------------------------------------------
# profiles


def test_profile_plateau_and_support():
    prof = BumpProfile(support=(1.0, 5.0), plateau=(2.0, 4.0))
    t = np.array([0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 7.0])
    vals = prof.value(t)
    assert_allclose(vals[[0, 1, 5, 6]], 0.0)
    assert_allclose(vals[[2, 3, 4]], 1.0)
    ramp = prof.value(np.array([1.5, 4.5]))
    assert np.all((ramp > 0.0) & (ramp < 1.0))


def test_profile_derivatives_match_fd():
    prof = BumpProfile(support=(1.0, 5.0), plateau=(2.0, 4.0))
    rng = np.random.default_rng(61)
    t = np.concatenate([rng.uniform(1.05, 1.95, 40),
                        rng.uniform(4.05, 4.95, 40)])
    h = 1e-6
    fd1 = (prof.value(t + h) - prof.value(t - h)) / (2.0 * h)
    assert_allclose(prof.derivative(t), fd1, rtol=1e-7, atol=1e-9)
    fd2 = (prof.derivative(t + h) - prof.derivative(t - h)) / (2.0 * h)
    assert_allclose(prof.second_derivative(t), fd2, rtol=1e-6, atol=1e-7)


def test_profile_validation_and_eval():
    with pytest.raises(ValueError):
        BumpProfile(support=(1.0, 2.0), plateau=(0.5, 1.5))
    prof = BumpProfile(support=(0.0, 1.0), plateau=(0.25, 0.75))
    assert bump_eval(prof, 0.5) == 1.0
    assert bump_eval(prof, 0.5, derivative=1) == 0.0
    with pytest.raises(ValueError):
        bump_eval(prof, 0.5, derivative=3)


# ---------------------------------------------------------------------------
# shell perturbations


def make_shell(a=(1.0, 4.0, 4.0, 10.0)):
    return ShellPerturbation(k=2, ell=1, a=a)


def test_shell_scales():
    sh = make_shell()
    assert sh.scale == 10.0
    assert sh.lam == 40.0
    assert sh.support == (5.0, 160.0)
    assert sh.plateau == (7.5, 120.0)


def test_shell_vanishes_outside_support():
    sh = make_shell()
    pts = np.array([[4.9, 0.0, 0.0], [0.0, 0.0, 161.0], [1.0, 1.0, 1.0]])
    assert_allclose(sh.eta(pts), 0.0)
    assert_allclose(sh.eta_grad(pts), 0.0)
    assert_allclose(sh.eta_lap(pts), 0.0)


def test_shell_plateau_is_pure_q():
    # on the plateau chi == 1, so eta is the bare q combination
    sh = make_shell()
    x = np.array([30.0, 10.0, 20.0])
    r = np.linalg.norm(x)
    lam = sh.lam
    a1, a2, a3, a4 = sh.a
    q = (a1 * r ** -2 + a2 / lam / r * (np.log(lam) - np.log(r))
         + a3 / lam ** 2 * (np.log(r) - np.log(lam))
         + a4 * lam ** -5 * x[2] ** 3)
    assert sh.eta(x) == pytest.approx(q, rel=1e-14)


def test_shell_grad_and_lap_match_fd():
    sh = make_shell()
    rng = np.random.default_rng(333)
    # points across ramps and plateau, away from the kinks
    r = np.concatenate([rng.uniform(5.5, 7.0, 30),
                        rng.uniform(9.0, 110.0, 40),
                        rng.uniform(125.0, 155.0, 30)])
    v = rng.normal(size=(100, 3))
    pts = v / np.linalg.norm(v, axis=1)[:, None] * r[:, None]
    # relative steps: the cubic a4 term makes |eta| ~ 0.3 at the outer
    # ramp, so an absolute step drowns the second difference in roundoff
    assert_allclose(sh.eta_grad(pts), fd_grad(sh.eta, pts, 1e-4 * r),
                    rtol=2e-4, atol=1e-10)
    assert_allclose(sh.eta_lap(pts), fd_lap(sh.eta, pts, 5e-4 * r),
                    rtol=2e-4, atol=1e-12)


def test_shell_closed_form_laplacian():
    sh = make_shell()
    pts = np.array([[12.0, 0.0, 9.0], [0.0, 40.0, 20.0], [60.0, 3.0, 1.0]])
    assert_allclose(shell_laplacian_closed_form(sh, pts), sh.eta_lap(pts),
                    rtol=1e-13)
    with pytest.raises(OutOfPlateauError):
        shell_laplacian_closed_form(sh, np.array([6.0, 0.0, 0.0]))


def test_shell_validation():
    with pytest.raises(ValueError):
        ShellPerturbation(k=0, ell=1, a=(1.0, 0.0, 0.0, 0.0))
    with pytest.raises(ValueError):
        ShellPerturbation(k=1, ell=1, a=(1.0, 0.0))


# ---------------------------------------------------------------------------
# models


def test_schwarzschild_basics():
    m = SchwarzschildModel()
    x = np.array([3.0, 0.0, 4.0])
    assert m.u(x) == pytest.approx(1.0 + 1.0 / 5.0)
    assert m.psi(x) == 0.0
    assert scalar_curvature(m, x) == 0.0
    assert m.curvature_support() == ()


def test_schwarzschild_translated():
    c = np.array([0.5, -0.25, 1.0])
    m = SchwarzschildModel(center=c)
    rng = np.random.default_rng(17)
    pts = rng.normal(size=(20, 3)) * 3.0 + np.array([0.0, 0.0, 6.0])
    rc = np.linalg.norm(pts - c, axis=1)
    assert_allclose(m.u(pts), 1.0 + 1.0 / rc, rtol=1e-14)
    # still scalar-flat
    assert_allclose(scalar_curvature(m, pts), 0.0, atol=1e-30)
    # psi derivatives agree with finite differences
    assert_allclose(m.psi_grad(pts), fd_grad(m.psi, pts, 1e-6),
                    rtol=1e-6, atol=1e-12)


def test_flat_model():
    m = SchwarzschildModel(mass=0.0)
    assert m.name == "flat"
    x = np.array([0.0, 2.0, 0.0])
    assert m.u(x) == 1.0


def test_oscillator_parity_and_curvature():
    m = OscillatorModel()
    pts = np.array([[0.0, 0.0, 4.0], [3.0, 0.0, 2.0]])
    flipped = pts * np.array([1.0, 1.0, -1.0])
    assert_allclose(m.psi(pts), -m.psi(flipped), rtol=1e-14)
    # plateau identity: R = 4 u^-5 z |x|^-6 at the default amplitude 1/8
    x = np.array([0.0, 1.0, 4.0])
    r = np.linalg.norm(x)
    u = m.u(x)
    assert scalar_curvature(m, x) == pytest.approx(
        4.0 * u ** -5 * x[2] * r ** -6, rel=1e-13)
    # vacuum in the gaps between shells
    gap = np.array([0.0, 0.0, 70.0])
    assert m.psi(gap) == 0.0
    assert scalar_curvature(m, gap) == 0.0


def test_oscillator_derivatives_match_fd():
    m = OscillatorModel()
    rng = np.random.default_rng(99)
    r = np.concatenate([rng.uniform(2.1, 5.9, 40),
                        rng.uniform(21.0, 59.0, 40)])
    v = rng.normal(size=(80, 3))
    pts = v / np.linalg.norm(v, axis=1)[:, None] * r[:, None]
    assert_allclose(m.psi_grad(pts), fd_grad(m.psi, pts, 1e-5),
                    rtol=2e-6, atol=1e-12)
    assert_allclose(m.psi_lap(pts), fd_lap(m.psi, pts, 1e-3),
                    rtol=2e-4, atol=1e-12)


def test_oscillator_scaled_supports():
    m = OscillatorModel(scale=25.0, k_min=2, k_max=2)
    (win,) = m.curvature_support()
    assert win == (2.0 * 2500.0, 6.0 * 2500.0)


def test_shell_sum_disjointness():
    m = make_model("shell-sum", k=2, i_max=3, a=(1.0, 4.0, 4.0, 0.0))
    assert len(m.shells) == 3
    wins = m.curvature_support()
    assert all(a1 < b0 for (_, a1), (b0, _) in zip(wins[:-1], wins[1:]))
    # k large enough makes neighbouring shells overlap
    with pytest.raises(ValueError):
        make_model("shell-sum", k=12, i_max=2, a=(1.0, 0.0, 0.0, 0.0))


def test_shell_sum_is_sum_of_shells():
    m = make_model("shell-sum", k=2, i_max=2, a=(1.0, 4.0, 4.0, 0.0))
    x = np.array([0.0, 30.0, 10.0])
    expect = sum(0.5 * s.eta(x) for s in m.shells)
    assert m.psi(x) == pytest.approx(expect, rel=1e-15)


def test_glued_model_branches():
    m = make_model("glued-slow-divergence")
    stage = m.stages[0]
    theta = stage["theta"]
    # inside [rho/2, 2 theta] the glue is 1 and psi equals the stage
    # shells; the fourth-root reconstruction limits agreement to the
    # round-off floor of the conformal factor itself
    x = np.array([0.0, 0.0, 9.0e4])
    expect = sum(0.5 * s.eta(x) for s in stage["shells"])
    assert abs(m.psi(x) - expect) < 5e-16
    # beyond 3 theta the metric is exactly Schwarzschild
    far = np.array([0.0, 3.1 * theta, 0.0])
    assert m.psi(far) == 0.0
    # the fourth-root chain leaves curvature at the 1e-39 roundoff floor
    # out here, unlike the masked catalog shells whose gaps are exact
    assert abs(scalar_curvature(m, far)) < 1e-30


def test_glued_model_ramp_derivatives_match_fd():
    # a compact stage whose shell support (5, 160) pokes into the inner
    # glue ramp [4, 6]: there both gamma' and the shell vary, exercising
    # the full product chain rule
    m = GluedModel([{"k": 2, "ells": (1,), "a": (1.0, 4.0, 4.0, 0.0),
                     "rho": 12.0, "theta": 100.0}])
    rng = np.random.default_rng(2024)
    r = rng.uniform(5.1, 5.9, 12)
    v = rng.normal(size=(12, 3))
    pts = v / np.linalg.norm(v, axis=1)[:, None] * r[:, None]
    # the ramp spans [4, 6], so the step tracks the ramp width, balancing
    # truncation against the 1e-16 noise floor of the fourth-root psi
    assert_allclose(m.psi_grad(pts), fd_grad(m.psi, pts, 2e-5),
                    rtol=2e-5, atol=5e-11)
    assert_allclose(m.psi_lap(pts), fd_lap(m.psi, pts, 2e-4 * r),
                    rtol=2e-4, atol=5e-8)
    # on [rho/2, 2 theta] the small-radius stage agrees with its shell to
    # much better than the big default stage (less cancellation headroom)
    x = np.array([0.0, 20.0, 9.0])
    expect = 0.5 * m.stages[0]["shells"][0].eta(x)
    assert m.psi(x) == pytest.approx(expect, rel=1e-11)


# ---------------------------------------------------------------------------
# pointwise geometry


def test_scalar_curvature_guard():
    m = SchwarzschildModel()
    with pytest.raises(SingularityError):
        scalar_curvature(m, np.array([0.5, 0.0, 0.0]))


def test_metric_deviation_structure():
    m = SchwarzschildModel()
    x = np.array([0.0, 3.0, 0.0])
    dev = metric_deviation(m, x)
    u4 = (1.0 + 1.0 / 3.0) ** 4
    assert_allclose(dev.h, (u4 - 1.0) * np.eye(3), rtol=1e-14)
    # the mass-2 model coincides with its own reference
    assert_allclose(dev.sigma, 0.0, atol=1e-16)
    assert_allclose(dev.dsigma, 0.0, atol=1e-18)


def test_metric_deviation_derivative_matches_fd():
    m = make_model("shell", k=2, ell=1, a=(1.0, 4.0, 4.0, 10.0))
    x = np.array([20.0, 5.0, 10.0])
    dev = metric_deviation(m, x)
    h = 1e-5

    def h00(pts):
        return np.array([metric_deviation(m, p).h[0, 0] for p in pts])

    fd = fd_grad(h00, x[None, :], h)[0]
    assert_allclose(dev.dh[:, 0, 0], fd, rtol=1e-6)


def test_shell_sigma_decay():
    m = make_model("shell", k=2, ell=1, a=(1.0, 4.0, 4.0, 0.0))
    rng = np.random.default_rng(10)
    r = rng.uniform(6.0, 150.0, 50)
    v = rng.normal(size=(50, 3))
    pts = v / np.linalg.norm(v, axis=1)[:, None] * r[:, None]
    dev = metric_deviation(m, pts)
    sig = dev.sigma[:, 0, 0]
    assert np.all(np.abs(sig) <= m.c_psi * r ** -2)


def test_mean_curvature_sphere_schwarzschild():
    m = SchwarzschildModel()
    lam = 7.0
    u = 1.0 + 1.0 / lam
    expect = u ** -2 * (2.0 / lam) - 4.0 * u ** -3 / lam ** 2
    got = mean_curvature_sphere(m, np.zeros(3), lam,
                                np.array([0.0, 0.0, 1.0]))
    assert got == pytest.approx(expect, rel=1e-14)
    # horizon sphere: H = 0 at radius 1
    assert mean_curvature_sphere(m, np.zeros(3), 1.0,
                                 np.array([1.0, 0.0, 0.0])) == \
        pytest.approx(0.0, abs=1e-15)
    with pytest.raises(SingularityError):
        mean_curvature_sphere(m, np.array([0.0, 0.0, 2.0]), 2.5,
                              np.array([0.0, 0.0, 1.0]))


def test_ricci_leading_structure():
    x = np.array([0.0, 0.0, 2.0])
    ric = ricci_schwarzschild_leading(x)
    assert np.trace(ric) == pytest.approx(0.0, abs=1e-15)
    assert_allclose(ric, np.diag([0.25, 0.25, -0.5]), rtol=1e-14)


def test_make_model_catalog():
    assert make_model("schwarzschild").name == "schwarzschild"
    assert make_model("com-oscillator", scale=3.0).scale == 3.0
    with pytest.raises(ValueError):
        make_model("lumpy")
