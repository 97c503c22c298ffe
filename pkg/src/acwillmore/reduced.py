"""Reduced energy over sphere translations.

For a conformal model the reduced energy of the translated sphere
``S_lam(lam*xi)`` splits as ``G(xi) = G1(xi) + G2(xi, lam)``:

``G1``
    The explicit part, a closed-form strictly convex function of
    ``t = |xi|`` with ``G1(0) = 0`` and a gradient parallel to ``xi``.
``G2``
    The scalar-curvature part ``2 lam * integral of R over the exterior of
    the ball B_lam(lam*xi)`` in the flat measure.  Its gradient in ``xi``
    is a moving-domain boundary flux, ``-2 lam**2 * surface integral of
    R nubar`` over the sphere.

The model truncates an O(1/lam) remainder: every downstream answer
(critical points, branch traces, comparator residuals) carries that
stated model error in addition to quadrature error.

The closed-form companions (``g1_boundary_form``,
``shell_gradient_closed_form``, ``offset_sphere_moment``) express the
singular behaviour of the gradients as the translation approaches the
unit ball boundary, and are used to validate the quadrature paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularityError
from .metrics import scalar_curvature
from .quadrature import (build_exterior_rule, build_sphere_rule,
                         compensated_sum, integrate_exterior, octave_ladder,
                         polar_breaks_for_radii)

__all__ = [
    "ReducedEnergyEval",
    "ClosedFormGradient",
    "g1",
    "grad_g1",
    "g1_boundary_form",
    "g2",
    "grad_g2",
    "shell_gradient_closed_form",
    "g_total",
    "hawking_from_g",
    "offset_sphere_moment",
]

_PI = math.pi
_E3 = np.array([0.0, 0.0, 1.0])

#: below this radius the closed forms switch to their power series
SERIES_RADIUS = 1e-3


def _radius(xi):
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (3,):
        raise DomainError("xi must be a 3-vector")
    t = float(np.linalg.norm(xi))
    if t >= 1.0:
        raise DomainError("translation parameter must satisfy |xi| < 1")
    return xi, t


def g1(xi):
    """Explicit energy of the translated sphere.

    g1 = 64 pi + 32 pi/(1-t**2) - 48 pi t**-1 log((1+t)/(1-t))
         - 128 pi log(1-t**2),  t = |xi|,

    with the removable singularity at t = 0 evaluated by series below
    ``SERIES_RADIUS``.  Nonnegative, zero only at xi = 0, strictly convex
    and increasing in t.
    """
    _, t = _radius(xi)
    if t < SERIES_RADIUS:
        t2 = t * t
        return _PI * t2 * (128.0 + t2 * (384.0 / 5.0 + t2 * 1280.0 / 21.0))
    return (64.0 * _PI + 32.0 * _PI / (1.0 - t * t)
            - 96.0 * _PI * math.atanh(t) / t
            - 128.0 * _PI * math.log1p(-t * t))


def _atanh_minus_geometric(t):
    """atanh(t) - t/(1-t**2), stable for all t in [0, 1).

    The two terms agree to third order; for small t the difference is the
    alternating-free series -sum_{k>=1} (2k/(2k+1)) t**(2k+1).
    """
    if t < 0.25:
        acc = 0.0
        power = t ** 3
        for k in range(1, 40):
            term = (2.0 * k / (2.0 * k + 1.0)) * power
            acc -= term
            power *= t * t
            if term < 1e-18 * max(abs(acc), 1e-300):
                break
        return acc
    return math.atanh(t) - t / (1.0 - t * t)


def _grad_g1_coefficient(t):
    """grad G1 = coefficient(t) * xi; series below ``SERIES_RADIUS``."""
    if t < SERIES_RADIUS:
        t2 = t * t
        return _PI * (256.0 + t2 * (1536.0 / 5.0 + t2 * 7680.0 / 21.0))
    one = 1.0 - t * t
    d = _atanh_minus_geometric(t)
    return (64.0 * _PI / one ** 2 + 96.0 * _PI * d / t ** 3
            + 256.0 * _PI / one)


def grad_g1(xi):
    """Gradient of :func:`g1`; parallel to ``xi`` by rotational symmetry."""
    xi, t = _radius(xi)
    return _grad_g1_coefficient(t) * xi


def g1_boundary_form(xi):
    """Leading singular form of grad G1 near the boundary ``|xi| = 1``.

    Returns ``2 pi [8 (1-t)**-2 + 40 (1-t)**-1 - 24 log(1-t)]`` in the unit
    direction of ``xi``.  The form carries the full singular expansion, so
    ``grad_g1 - g1_boundary_form`` stays bounded as ``t`` increases to 1;
    the unit direction (rather than xi itself) is what makes the remainder
    bounded, since scaling the singular bracket by ``t`` shifts the
    ``(1-t)**-1`` coefficient.

    Valid only for ``0.5 < |xi| < 1``.
    """
    xi, t = _radius(xi)
    if not 0.5 < t < 1.0:
        raise DomainError("boundary form requires 0.5 < |xi| < 1")
    eps = 1.0 - t
    mag = 2.0 * _PI * (8.0 / eps ** 2 + 40.0 / eps - 24.0 * math.log(eps))
    return mag * (xi / t)


def offset_sphere_moment(order, t):
    """Closed-form moment  integral_{S_1(xi)} |x|**-order nubar dmu.

    By symmetry the integral points along the unit direction of ``xi``;
    this returns the (signed) coefficient as a function of ``t = |xi|``
    for orders 2, 3, 4.  All three vanish at t = 0 and diverge as t -> 1
    (logarithmically, as (1-t)**-1, and as (1-t)**-2 respectively).
    """
    if not 0.0 <= t < 1.0:
        raise DomainError("moment defined for 0 <= t < 1")
    if order == 3:
        return -4.0 * _PI * t / (1.0 - t * t)
    if order == 2:
        if t < SERIES_RADIUS:
            return -2.0 * _PI * t * (4.0 / 3.0 + t * t * (8.0 / 15.0))
        return 2.0 * _PI * (1.0 / t
                            - (1.0 + t * t) * math.atanh(t) / t ** 2)
    if order == 4:
        if t < SERIES_RADIUS:
            return -2.0 * _PI * t * (8.0 / 3.0 + t * t * (24.0 / 5.0))
        return 2.0 * _PI * (math.atanh(t) / t ** 2
                            - (1.0 + t * t) / (t * (1.0 - t * t) ** 2))
    raise ValueError("order must be 2, 3, or 4")


# ---------------------------------------------------------------------------
# quadrature part


def _check_geometry(xi, lam):
    xi, t = _radius(xi)
    if not (np.isfinite(lam) and lam > 0.0):
        raise DomainError("lam must be positive")
    if lam * (1.0 - t) <= 1.0:
        raise SingularityError(
            "the ball B_lam(lam*xi) must contain the region |x| <= 1")
    return xi, t


def g2(model, xi, lam, n_radial=24, n_polar=24, n_azimuth=48):
    """Scalar-curvature energy ``2 lam * integral_{exterior} R dv``.

    The exterior of ``B_lam(lam*xi)`` is integrated with a support-aware
    rule: models with compactly supported curvature declare annuli and the
    vacuum gaps are skipped exactly, so a scalar-flat model gives 0.0
    without any quadrature.
    """
    xi, t = _check_geometry(xi, lam)
    support = model.curvature_support()
    if support is not None and len(support) == 0:
        return 0.0
    rule = build_exterior_rule(lam * xi, lam, support=support,
                               decay=model.curvature_decay(),
                               feature_radii=model.feature_radii(),
                               n_radial=n_radial, n_polar=n_polar,
                               n_azimuth=n_azimuth)
    val = integrate_exterior(lambda pts: scalar_curvature(model, pts), rule)
    return 2.0 * lam * val


def grad_g2(model, xi, lam, n_polar=48, n_azimuth=96):
    """Moving-domain gradient ``-2 lam**2 integral_{S_lam(lam*xi)} R nubar``.

    The translation derivative of :func:`g2` is a pure boundary flux:
    shifting the excluded ball sweeps curvature across its boundary sphere.
    Exact zero (no quadrature) when the sphere lies in a declared vacuum
    gap of the model.
    """
    xi, t = _check_geometry(xi, lam)
    support = model.curvature_support()
    rlo, rhi = lam * (1.0 - t), lam * (1.0 + t)
    if support is not None:
        hit = [w for w in support if w[1] >= rlo and w[0] <= rhi]
        if not hit:
            return np.zeros(3)
    center = lam * xi
    radii = set(model.feature_radii())
    if t > 0.0:
        radii.update(octave_ladder(rlo, rhi))
    breaks = polar_breaks_for_radii(center, lam, sorted(radii))
    rule = build_sphere_rule(center, lam, n_polar=n_polar,
                             n_azimuth=n_azimuth, cos_breaks=breaks)
    vals = scalar_curvature(model, rule.nodes)
    flux = compensated_sum(rule.weights[:, None]
                           * vals[:, None] * rule.normals, axis=0)
    return -2.0 * lam ** 2 * flux


@dataclass
class ClosedFormGradient:
    """A closed-form gradient plus an unevaluated bounded-remainder marker.

    Behaves as its ``vector`` under numpy coercion; ``remainder`` records
    the dropped term symbolically.
    """

    vector: np.ndarray
    remainder: str

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.vector, dtype=dtype)


def shell_gradient_closed_form(shell, xi):
    """Singular closed form of the shell metric's grad G2.

    -16 pi [a1 (1-t)**-2 + (a1+a2) (1-t)**-1 + (a1-a3) log(1-t)] xihat
    + 64 pi a4 e3,

    where ``xihat`` is the unit direction of ``xi`` (the singular bracket
    is defined as zero at xi = 0).  The dropped remainder
    ``8 sum_i a_i f_i(|xi|) xi`` is bounded on ``|xi| < 1 - k**-2`` and is
    returned unevaluated as a marker string.  The form is independent of
    the shell's radius scale; validity requires the translated sphere to
    stay inside the shell's plateau, i.e. ``|xi| < 1 - k**-2``.
    """
    a1, a2, a3, a4 = shell.a
    xi, t = _radius(xi)
    vec = 64.0 * _PI * a4 * _E3.copy()
    if t > 0.0:
        eps = 1.0 - t
        bracket = (a1 / eps ** 2 + (a1 + a2) / eps
                   + (a1 - a3) * math.log(eps))
        vec = vec - 16.0 * _PI * bracket * (xi / t)
    return ClosedFormGradient(
        vector=vec,
        remainder="8*sum_i a_i*f_i(|xi|)*xi (f_i bounded; not evaluated)")


@dataclass
class ReducedEnergyEval:
    """One evaluation of the reduced energy and its gradient.

    Satisfies ``g = g1 + g2`` and ``grad_g = grad_g1 + grad_g2``;
    ``grad_g1`` is parallel to ``xi``.  The dropped O(1/lam) remainder of
    the underlying expansion is not part of this record.
    """

    xi: np.ndarray
    lam: float
    g1: float
    g2: float
    g: float
    grad_g1: np.ndarray
    grad_g2: np.ndarray
    grad_g: np.ndarray


def g_total(model, xi, lam, n_radial=24, n_polar=32, n_azimuth=64):
    """Assemble the full reduced-energy record at one ``(xi, lam)``.

    The returned energies model the sphere energy only to O(1/lam): the
    next-order term (and all finer corrections) are intentionally outside
    the model, so comparisons against flux quantities carry that error.
    """
    xi, t = _radius(xi)
    v1 = g1(xi)
    gr1 = grad_g1(xi)
    v2 = g2(model, xi, lam, n_radial=n_radial, n_polar=n_polar,
            n_azimuth=n_azimuth)
    gr2 = grad_g2(model, xi, lam, n_polar=max(n_polar, 48),
                  n_azimuth=max(n_azimuth, 96))
    return ReducedEnergyEval(xi=xi, lam=float(lam), g1=v1, g2=v2,
                             g=v1 + v2, grad_g1=gr1, grad_g2=gr2,
                             grad_g=gr1 + gr2)


def hawking_from_g(g, lam):
    """Hawking-mass bridge:  ``m_H = 2 - G/(32 pi lam)``.

    Monotone decreasing in G: negative reduced energy means Hawking mass
    above 2, zero gives exactly 2.
    """
    if not lam > 0.0:
        raise DomainError("lam must be positive")
    return 2.0 - g / (32.0 * _PI * lam)
