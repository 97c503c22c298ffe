"""Critical points of the reduced energy and derived comparisons.

The reduced energy lives on the open unit ball of translations; its
gradient is exact up to quadrature (closed form plus a single sphere
flux), while Hessians are finite differences of the gradient.  The
solver is a damped Newton iteration on the gradient with the gradient
norm as merit, trust-capped steps, and projection onto ``|xi| <= 1 -
delta``; a point pinned to that constraint with an outward-pointing
descent direction is reported as a boundary hit rather than a critical
point.

All linear algebra on the 3x3 systems is closed form (Cramer solve,
trigonometric symmetric eigenvalues) so that results are bitwise
reproducible across BLAS builds and thread counts.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import (BracketingError, DomainError, HypothesisViolation,
                     NonConvergenceError)
from .quadrature import (build_sphere_rule, compensated_sum, integrate_sphere,
                         octave_ladder, polar_breaks_for_radii)
from .reduced import grad_g1, grad_g2, g_total
from .flux import hamiltonian_com

logger = logging.getLogger(__name__)

__all__ = [
    "CriticalPoint",
    "BranchTrace",
    "ComComparison",
    "ScanResult",
    "find_critical_point",
    "trace_branch",
    "com_compare",
    "stationary_scan",
    "convexity_check",
    "ray_map",
    "fd_hessian",
]

_PI = math.pi

#: finite-difference step for Hessians of the reduced energy
HESSIAN_STEP = 1e-3

_CLASS_RANK = {"min": 0, "saddle": 1, "boundary-hit": 2}


# ---------------------------------------------------------------------------
# deterministic small linear algebra


def _solve3(a, b):
    """Cramer solve of a 3x3 system; raises ZeroDivisionError if singular."""
    d = (a[0, 0] * (a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
         - a[0, 1] * (a[1, 0] * a[2, 2] - a[1, 2] * a[2, 0])
         + a[0, 2] * (a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0]))
    scale = float(np.max(np.abs(a)))
    if not np.isfinite(d) or abs(d) <= 1e-14 * max(scale, 1.0) ** 3:
        raise ZeroDivisionError("singular 3x3 system")
    out = np.empty(3)
    for j in range(3):
        m = a.copy()
        m[:, j] = b
        dj = (m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
              - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
              + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0]))
        out[j] = dj / d
    return out

def _sym_eigvals3(h):
    """Eigenvalues of a symmetric 3x3 matrix, ascending, closed form."""
    p1 = h[0, 1] ** 2 + h[0, 2] ** 2 + h[1, 2] ** 2
    if p1 == 0.0:
        return np.sort(np.diagonal(h).copy())
    q = float(np.trace(h)) / 3.0
    p2 = ((h[0, 0] - q) ** 2 + (h[1, 1] - q) ** 2 + (h[2, 2] - q) ** 2
          + 2.0 * p1)
    p = math.sqrt(p2 / 6.0)
    b = (h - q * np.eye(3)) / p
    detb = (b[0, 0] * (b[1, 1] * b[2, 2] - b[1, 2] * b[2, 1])
            - b[0, 1] * (b[1, 0] * b[2, 2] - b[1, 2] * b[2, 0])
            + b[0, 2] * (b[1, 0] * b[2, 1] - b[1, 1] * b[2, 0]))
    r = min(1.0, max(-1.0, detb / 2.0))
    phi = math.acos(r) / 3.0
    e1 = q + 2.0 * p * math.cos(phi)
    e3 = q + 2.0 * p * math.cos(phi + 2.0 * _PI / 3.0)
    e2 = 3.0 * q - e1 - e3
    return np.sort(np.array([e1, e2, e3]))


# ---------------------------------------------------------------------------
# gradient / Hessian plumbing


def _grad_total(model, xi, lam, n_polar, n_azimuth):
    return grad_g1(xi) + grad_g2(model, xi, lam, n_polar=n_polar,
                                 n_azimuth=n_azimuth)


def fd_hessian(model, xi, lam, h=HESSIAN_STEP, n_polar=48, n_azimuth=96):
    """Central-difference Hessian of the reduced energy.

    Returns ``(H, asymmetry)``: the symmetrized matrix and the relative
    asymmetry of the raw difference matrix (gradients are exact up to
    quadrature, so the asymmetry measures quadrature noise).
    """
    xi = np.asarray(xi, dtype=float)
    raw = np.empty((3, 3))
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        gp = _grad_total(model, xi + e, lam, n_polar, n_azimuth)
        gm = _grad_total(model, xi - e, lam, n_polar, n_azimuth)
        raw[:, j] = (gp - gm) / (2.0 * h)
    scale = float(np.max(np.abs(raw)))
    asym = float(np.max(np.abs(raw - raw.T))) / max(scale, 1e-300)
    return 0.5 * (raw + raw.T), asym


# ---------------------------------------------------------------------------
# result records


@dataclass
class CriticalPoint:
    """A located stationary (or constraint-pinned) translation parameter.

    ``rho`` and ``theta`` are the inner and outer coordinate radii of the
    sphere ``S_lam(lam*xi)``; they always satisfy ``rho + theta = 2 lam``.
    ``classification`` is ``"min"`` (all FD Hessian eigenvalues positive),
    ``"saddle"`` (any nonpositive eigenvalue; maxima are reported as
    saddles), or ``"boundary-hit"`` (the constraint ``|xi| <= 1 - delta``
    is active; the gradient norm then need not be small).
    """

    xi: np.ndarray
    lam: float
    grad_norm: float
    hessian_eigenvalues: np.ndarray
    barycenter: np.ndarray
    rho: float
    theta: float
    classification: str


@dataclass
class BranchTrace:
    """Critical points along an increasing ladder of sphere radii.

    ``oscillation`` is the per-component max-minus-min of the barycenter
    over the trace: a nonzero value that fails to shrink as the ladder
    grows is the numerical signature of a divergent center of mass.
    """

    points: tuple
    oscillation: np.ndarray


@dataclass
class ComComparison:
    """Barycenter vs flux center vs curvature flux at one radius.

    residual = barycenter - c_flux - curvature_term, the empirical o(1)
    defect of the comparison identity.
    """

    lam: float
    c_flux: np.ndarray
    barycenter: np.ndarray
    curvature_term: np.ndarray
    residual: np.ndarray


@dataclass
class ScanResult:
    """Grid certificate for (non)existence of stationary points."""

    min_grad_norm: float
    argmin: np.ndarray
    grid_min_grad_norm: float
    grid_argmin: np.ndarray
    n_points: int
    spacing: float


# ---------------------------------------------------------------------------
# Newton solver


def _default_seeds(delta):
    # the near-boundary rungs are deliberately dense: energy wells pinned
    # against the translation constraint can have basins only a few
    # hundredths wide
    r = 1.0 - delta
    return (np.zeros(3),
            np.array([0.0, 0.0, 0.35 * r]),
            np.array([0.0, 0.0, -0.35 * r]),
            np.array([0.0, 0.0, 0.75 * r]),
            np.array([0.0, 0.0, 0.90 * r]),
            np.array([0.0, 0.0, 0.94 * r]),
            np.array([0.0, 0.0, 0.95 * r]),
            np.array([0.35 * r, 0.0, 0.0]))


def _project(xi, rmax):
    n = float(np.linalg.norm(xi))
    if n > rmax:
        return xi * (rmax / n), True
    return xi, False


def _newton_from_seed(model, lam, seed, rmax, tol_factor, max_iter,
                      n_polar, n_azimuth):
    """Run the damped iteration; returns (xi, grad, status) or None."""
    xi, _ = _project(np.asarray(seed, dtype=float), rmax)
    g = _grad_total(model, xi, lam, n_polar, n_azimuth)
    gn = float(np.linalg.norm(g))
    tol = tol_factor * max(1.0, gn)
    pinned = 0
    for _ in range(max_iter):
        if gn <= tol:
            return xi, g, "converged"
        hess, _ = fd_hessian(model, xi, lam, n_polar=n_polar,
                             n_azimuth=n_azimuth)
        try:
            step = _solve3(hess, -g)
        except ZeroDivisionError:
            step = -g / max(gn, 1e-300) * 0.05
        ns = float(np.linalg.norm(step))
        if not np.all(np.isfinite(step)) or ns == 0.0:
            step = -g / max(gn, 1e-300) * 0.05
            ns = float(np.linalg.norm(step))
        if ns > 0.25:
            step = step * (0.25 / ns)
        alpha = 1.0
        accepted = False
        for _ls in range(10):
            cand, proj = _project(xi + alpha * step, rmax)
            gc = _grad_total(model, cand, lam, n_polar, n_azimuth)
            gcn = float(np.linalg.norm(gc))
            if gcn <= tol or gcn < (1.0 - 1e-4 * alpha) * gn:
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            # stuck against the constraint with an outward push counts as
            # a boundary hit, anything else as a failed seed
            if float(np.linalg.norm(xi)) >= rmax * (1.0 - 1e-9) \
                    and float(np.dot(g, xi)) < 0.0:
                return xi, g, "boundary-hit"
            return None
        xi, g, gn = cand, gc, gcn
        if proj and float(np.linalg.norm(xi)) >= rmax * (1.0 - 1e-9) \
                and float(np.dot(g, xi)) < 0.0:
            pinned += 1
            if pinned >= 3:
                return xi, g, "boundary-hit"
        else:
            pinned = 0
    return None


def _classify(model, lam, xi, grad, status, n_polar, n_azimuth):
    hess, _ = fd_hessian(model, xi, lam, n_polar=n_polar,
                         n_azimuth=n_azimuth)
    eigs = _sym_eigvals3(hess)
    if status == "boundary-hit":
        cls = "boundary-hit"
    elif np.all(eigs > 0.0):
        cls = "min"
    else:
        cls = "saddle"
    t = float(np.linalg.norm(xi))
    return CriticalPoint(xi=xi, lam=float(lam),
                         grad_norm=float(np.linalg.norm(grad)),
                         hessian_eigenvalues=eigs,
                         barycenter=lam * xi,
                         rho=lam * (1.0 - t), theta=lam * (1.0 + t),
                         classification=cls)


def find_critical_point(model, lam, delta=0.25, seeds=None, n_polar=48,
                        n_azimuth=96, tol_factor=1e-9, max_iter=200):
    """Locate a stationary point of the reduced energy.

    Damped Newton on the gradient from each seed, constrained to
    ``|xi| <= 1 - delta``.  Converged points are deduplicated (distance
    1e-6) and the best survivor is returned, preferring minima over
    saddles over boundary hits, then smaller gradient norm; the
    preference makes the answer independent of seed ordering.  Seeds
    that fail to converge are logged, not fatal; only a total wipeout
    raises :class:`NonConvergenceError`.
    """
    if not 0.0 < delta < 0.5:
        raise DomainError("delta must lie in (0, 1/2)")
    rmax = 1.0 - delta
    if seeds is None:
        seeds = _default_seeds(delta)
    outcomes = []
    failures = 0
    for seed in seeds:
        res = _newton_from_seed(model, lam, seed, rmax, tol_factor,
                                max_iter, n_polar, n_azimuth)
        if res is None:
            failures += 1
            logger.warning("seed %s did not converge at lam=%g",
                           np.asarray(seed), lam)
            continue
        outcomes.append(res)
    if not outcomes:
        raise NonConvergenceError(
            f"no seed converged at lam={lam} ({failures} failures)")
    distinct = []
    for xi, g, status in outcomes:
        if any(np.linalg.norm(xi - o[0]) <= 1e-6 for o in distinct):
            continue
        distinct.append((xi, g, status))
    points = [_classify(model, lam, xi, g, status, n_polar, n_azimuth)
              for xi, g, status in distinct]
    points.sort(key=lambda p: (_CLASS_RANK[p.classification], p.grad_norm,
                               tuple(p.xi)))
    return points[0]


def trace_branch(model, lam_grid, delta=0.25, seeds=None, n_polar=48,
                 n_azimuth=96):
    """Track the critical point over an increasing radius ladder.

    Each radius is solved with the default seeds plus the previous
    radius's solution as a warm start; the selection rule in
    :func:`find_critical_point` keeps the result independent of that
    seeding order.  Per-radius failures are recorded as gaps (logged)
    rather than aborting the trace.
    """
    lams = [float(l) for l in lam_grid]
    if any(b <= a for a, b in zip(lams[:-1], lams[1:])):
        raise DomainError("lam grid must be strictly increasing")
    base = tuple(seeds) if seeds is not None else _default_seeds(delta)
    points = []
    prev = None
    for lam in lams:
        seed_list = base if prev is None else base + (prev,)
        try:
            cp = find_critical_point(model, lam, delta=delta,
                                     seeds=seed_list, n_polar=n_polar,
                                     n_azimuth=n_azimuth)
        except NonConvergenceError:
            logger.warning("no critical point found at lam=%g", lam)
            continue
        points.append((lam, cp))
        prev = cp.xi
    if points:
        bary = np.array([cp.barycenter for _, cp in points])
        osc = bary.max(axis=0) - bary.min(axis=0)
    else:
        osc = np.zeros(3)
    return BranchTrace(points=tuple(points), oscillation=osc)


def com_compare(model, lam, delta=0.25, n_polar=48, n_azimuth=96):
    """Compare the barycenter against flux center plus curvature flux.

    The curvature term is ``(1/128 pi) lam**3 * integral of R nubar`` over
    the critical sphere; the flux center is extrapolated.  The residual is
    the empirical o(1) defect: it should be small against the barycenter
    in the agreement regime and need not shrink for metrics engineered to
    break the flux center.
    """
    cp = find_critical_point(model, lam, delta=delta, n_polar=n_polar,
                             n_azimuth=n_azimuth)
    c_flux = np.asarray(hamiltonian_com(model, lam, n_polar=n_polar,
                                        n_azimuth=n_azimuth))
    gr2 = grad_g2(model, cp.xi, lam, n_polar=n_polar, n_azimuth=n_azimuth)
    curvature = -lam * gr2 / (256.0 * _PI)
    residual = cp.barycenter - c_flux - curvature
    return ComComparison(lam=float(lam), c_flux=c_flux,
                         barycenter=cp.barycenter,
                         curvature_term=curvature, residual=residual)


def stationary_scan(model, lam, delta=0.25, spacing=0.05, refine=True,
                    n_polar=16, n_azimuth=32, tol_factor=1e-9,
                    max_iter=200):
    """Gradient-norm scan over a cubic grid filling ``|xi| <= 1 - delta``.

    Returns the grid minimum and (when ``refine`` is set) a Newton polish
    started from the grid argmin.  A refined minimum bounded well away
    from zero certifies empirical nonexistence of stationary points at
    this radius; a refined minimum at solver tolerance exhibits one.
    The scan resolution is deliberately coarse (the gradient scale of
    interest is O(100)); override ``n_polar``/``n_azimuth`` for sharp
    work.
    """
    if not 0.0 < delta < 0.5:
        raise DomainError("delta must lie in (0, 1/2)")
    rmax = 1.0 - delta
    m = int(math.floor(rmax / spacing))
    best = None
    count = 0
    for i in range(-m, m + 1):
        for j in range(-m, m + 1):
            for k in range(-m, m + 1):
                xi = spacing * np.array([i, j, k], dtype=float)
                if float(np.linalg.norm(xi)) > rmax:
                    continue
                count += 1
                gn = float(np.linalg.norm(
                    _grad_total(model, xi, lam, n_polar, n_azimuth)))
                if best is None or gn < best[0]:
                    best = (gn, xi)
    if best is None:
        raise DomainError("grid spacing leaves no points inside the ball")
    grid_gn, grid_xi = best
    min_gn, argmin = grid_gn, grid_xi
    if refine:
        res = _newton_from_seed(model, lam, grid_xi, rmax, tol_factor,
                                max_iter, n_polar=48, n_azimuth=96)
        if res is not None:
            xi, g, _status = res
            gn = float(np.linalg.norm(g))
            if gn < min_gn:
                min_gn, argmin = gn, xi
    return ScanResult(min_grad_norm=min_gn, argmin=argmin,
                      grid_min_grad_norm=grid_gn, grid_argmin=grid_xi,
                      n_points=count, spacing=float(spacing))


# ---------------------------------------------------------------------------
# convexity machinery


def _weighted_flux_rule(center, radius, n_polar, n_azimuth):
    dist = float(np.linalg.norm(center))
    lo, hi = abs(radius - dist), radius + dist
    radii = octave_ladder(lo, hi) if (dist > 0.0 and lo > 0.0) else ()
    breaks = polar_breaks_for_radii(center, radius, radii)
    return build_sphere_rule(center, radius, n_polar=n_polar,
                             n_azimuth=n_azimuth, cos_breaks=breaks)


def convexity_check(f, xi1, xi2, lam, n_polar=48, n_azimuth=96,
                    hypothesis_samples=128, rng=None):
    """Directional monotonicity margin of a weighted flux between spheres.

    For a nonnegative field whose ``|x|**2``-weighted radial derivative is
    nonpositive, the flux of ``f * (nubar . (xi2 - xi1))`` through
    ``S_lam(lam*xi1)`` dominates the flux through ``S_lam(lam*xi2)``;
    the returned margin LHS - RHS must be nonnegative up to quadrature
    tolerance.  The hypothesis is spot-checked by seeded sampling on the
    annulus spanned by the two spheres; violations raise a
    :class:`HypothesisViolation` warning, not an error, since the caller
    declared the field admissible.
    """
    xi1 = np.asarray(xi1, dtype=float)
    xi2 = np.asarray(xi2, dtype=float)
    t1, t2 = float(np.linalg.norm(xi1)), float(np.linalg.norm(xi2))
    if t1 >= 1.0 or t2 >= 1.0:
        raise DomainError("|xi| must be < 1")
    direction = xi2 - xi1

    if hypothesis_samples > 0:
        import warnings
        gen = rng if rng is not None else np.random.default_rng(0)
        r_lo = lam * (1.0 - max(t1, t2))
        r_hi = lam * (1.0 + max(t1, t2))
        v = gen.normal(size=(hypothesis_samples, 3))
        v /= np.linalg.norm(v, axis=1)[:, None]
        r = np.exp(gen.uniform(math.log(max(r_lo, 1e-12)), math.log(r_hi),
                               size=hypothesis_samples))
        pts = v * r[:, None]
        vals = np.asarray(f(pts), dtype=float)
        scale = float(np.max(np.abs(vals))) + 1e-300
        if np.any(vals < -1e-12 * scale):
            warnings.warn("sampled field takes negative values",
                          HypothesisViolation)
        h = 1e-5 * r
        wp = (r + h) ** 2 * np.asarray(f(v * (r + h)[:, None]))
        wm = (r - h) ** 2 * np.asarray(f(v * (r - h)[:, None]))
        dw = (wp - wm) / (2.0 * h)
        if np.any(dw > 1e-6 * scale * lam):
            warnings.warn("sampled |x|**2-weighted field is radially "
                          "increasing somewhere", HypothesisViolation)

    def side(xi):
        rule = _weighted_flux_rule(lam * xi, lam, n_polar, n_azimuth)

        def integrand(pts):
            return np.asarray(f(pts), dtype=float) \
                * (rule.normals * direction).sum(axis=1)

        return integrate_sphere(integrand, rule)

    return side(xi1) - side(xi2)


def ray_map(zeta, xi1, xi2):
    """Solve the ray-crossing relation between two translated spheres.

    In the frame whose axis is the unit vector from ``xi1`` to ``xi2``
    (offsets ``a`` and ``b`` along it), the polar angle ``theta`` on the
    first sphere that sees the same ray as angle ``zeta`` on the second
    satisfies

        (cos zeta + b) / (cos theta + a) = sin zeta / sin theta .

    Returns ``(theta, t)`` with ``theta`` in ``(0, zeta]`` and ``t = sin
    zeta / sin theta`` the radial stretch.  The bracket ``F(0+) > 0 >
    F(zeta)`` is guaranteed by ``b > a``; a failure to bracket is fatal.
    Geometrically ``t`` should exceed 1 when ``|xi2| > |xi1|``; that is
    logged when violated, never asserted.
    """
    if not 0.0 < zeta < _PI:
        raise DomainError("zeta must lie in (0, pi)")
    xi1 = np.asarray(xi1, dtype=float)
    xi2 = np.asarray(xi2, dtype=float)
    if float(np.linalg.norm(xi1)) >= 1.0 or float(np.linalg.norm(xi2)) >= 1.0:
        raise DomainError("|xi| must be < 1")
    diff = xi2 - xi1
    nd = float(np.linalg.norm(diff))
    if nd == 0.0:
        raise DomainError("xi1 and xi2 must be distinct")
    axis = diff / nd
    a = float(np.dot(xi1, axis))
    b = float(np.dot(xi2, axis))
    sz, cz = math.sin(zeta), math.cos(zeta)

    def fval(theta):
        return sz * (math.cos(theta) + a) - math.sin(theta) * (cz + b)

    lo, hi = 1e-14, zeta
    flo, fhi = fval(lo), fval(hi)
    if not (flo > 0.0 and fhi < 0.0):
        if fhi == 0.0:
            theta = hi
            return theta, sz / math.sin(theta)
        raise BracketingError(
            f"no sign change on (0, zeta) for zeta={zeta}, a={a}, b={b}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = fval(mid)
        if fm > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    theta = 0.5 * (lo + hi)
    # Newton polish
    for _ in range(8):
        fp = -sz * math.sin(theta) - math.cos(theta) * (cz + b)
        if fp == 0.0:
            break
        step = fval(theta) / fp
        cand = theta - step
        if not lo - 1e-12 <= cand <= hi + 1e-12:
            break
        theta = cand
        if abs(step) < 1e-16:
            break
    t = sz / math.sin(theta)
    if t <= 1.0 and nd > 1e-12:
        logger.info("ray map stretch t=%.6f <= 1 at zeta=%.6f (a=%.4f, "
                    "b=%.4f)", t, zeta, a, b)
    return theta, t
