"""Legendre polynomials and the explicit series around round spheres.

Three series appear in the expansion of the reduced energy machinery around
a translated round sphere: the leading-order graph profile of the perturbed
sphere, the Willmore operator of an off-center sphere in the Schwarzschild
background, and the Lagrange multiplier of the area constraint.  All three
are polynomial series in ``|xi|`` with Legendre-polynomial angular factors;
this module evaluates them under an explicit, certified tail bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NonConvergenceError

__all__ = [
    "SeriesTruncation",
    "legendre_eval",
    "legendre_table",
    "graph_profile",
    "willmore_operator_sphere",
    "lagrange_multiplier_estimate",
]

_CLAMP_SLACK = 1e-12


@dataclass(frozen=True)
class SeriesTruncation:
    """Truncation policy for the ``|xi|``-power series.

    Attributes
    ----------
    max_degree : int
        Largest Legendre degree the caller permits (>= 2).
    tail_tolerance : float
        A series is reported converged only when its tail bound at the
        truncation degree is below this tolerance.  The certified bound is
        at least as strong as the geometric bound
        ``|xi|**(L+1) / (1 - |xi|)``.
    """

    max_degree: int = 60
    tail_tolerance: float = 1e-10

    def __post_init__(self):
        if self.max_degree < 2:
            raise ValueError("max_degree must be >= 2")
        if not self.tail_tolerance > 0.0:
            raise ValueError("tail_tolerance must be positive")


def _clamp_argument(s):
    s = np.asarray(s, dtype=float)
    if np.any(np.abs(s) > 1.0 + _CLAMP_SLACK):
        raise DomainError("Legendre argument outside [-1, 1] beyond "
                          "round-off slack; caller bug")
    return np.clip(s, -1.0, 1.0)


def legendre_table(max_degree, s):
    """All Legendre values ``P_0(s) .. P_max_degree(s)``.

    Uses the three-term recurrence
    ``(l+1) P_{l+1} = (2l+1) s P_l - l P_{l-1}``.

    Parameters
    ----------
    max_degree : int
    s : array_like in [-1, 1]

    Returns
    -------
    ndarray, shape (max_degree + 1,) + shape(s)
    """
    s = _clamp_argument(s)
    out = np.empty((max_degree + 1,) + s.shape)
    out[0] = 1.0
    if max_degree >= 1:
        out[1] = s
    for l in range(1, max_degree):
        out[l + 1] = ((2 * l + 1) * s * out[l] - l * out[l - 1]) / (l + 1)
    return out


def legendre_eval(l, s):
    """Legendre polynomial ``P_l(s)`` by the three-term recurrence.

    ``s`` may be a scalar or array; values outside ``[-1, 1]`` by more than
    1e-12 raise :class:`DomainError`, smaller excursions (quadrature
    round-off) are clamped.  Satisfies ``|P_l(s)| <= 1``.
    """
    if l < 0:
        raise DomainError("degree must be non-negative")
    table = legendre_table(l, s)
    val = table[l]
    if val.ndim == 0:
        return float(val)
    return val


def _geometric_degree(t, trunc):
    """Smallest L with t**(L+1)/(1-t) <= tol, or raise."""
    if t == 0.0:
        return 0
    tol = trunc.tail_tolerance
    for L in range(trunc.max_degree + 1):
        if t ** (L + 1) / (1.0 - t) <= tol:
            return L
    raise NonConvergenceError(
        f"geometric tail bound not met by degree {trunc.max_degree} "
        f"at |xi| = {t}")


def _cubic_weighted_degree(t, trunc):
    """Smallest L certifying the (l+2)^3-weighted tail below tolerance.

    The coefficients of the sphere Willmore series grow like ``l**3``, so
    the plain geometric bound undercounts the tail.  We certify
    ``sum_{l>L} (l+2)^3 t^l <= (L+3)^3 t^(L+1) / (1 - t r)`` with
    ``r = ((L+4)/(L+3))^3`` whenever ``t r < 1``; this is strictly stronger
    than (and so also certifies) the geometric bound.
    """
    if t == 0.0:
        return 0
    tol = trunc.tail_tolerance
    for L in range(trunc.max_degree + 1):
        growth = ((L + 4) / (L + 3)) ** 3
        if t * growth >= 1.0:
            continue
        bound = (L + 3) ** 3 * t ** (L + 1) / (1.0 - t * growth)
        if bound <= tol:
            return L
    raise NonConvergenceError(
        f"weighted tail bound not met by degree {trunc.max_degree} "
        f"at |xi| = {t}")


def _radius(xi):
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (3,):
        raise DomainError("xi must be a 3-vector")
    return float(np.linalg.norm(xi))


def graph_profile(xi, s, trunc=SeriesTruncation()):
    """Leading-order graph function of the translated sphere.

    Returns ``-2 + 4 sum_{l>=2} (|xi|**l / l) P_l(s)``; the omitted
    correction is O(1/lambda).  The argument ``s`` is the caller-computed
    cosine ``-|xi|**-1 <y, xi>`` (any value when ``xi = 0``).  Depends on
    ``xi`` only through ``|xi|`` (rotation covariance).

    Raises
    ------
    NonConvergenceError
        If the geometric tail bound cannot be certified below
        ``trunc.tail_tolerance`` by degree ``trunc.max_degree``.
    """
    t = _radius(xi)
    if t >= 1.0:
        raise DomainError("|xi| must be < 1")
    if t == 0.0:
        return -2.0
    L = max(_geometric_degree(t, trunc), 2)
    table = legendre_table(L, s)
    powers = np.array([t ** l / l for l in range(2, L + 1)])
    acc = 0.0
    for l in range(L, 1, -1):          # smallest terms first
        acc = acc + powers[l - 2] * table[l]
    out = -2.0 + 4.0 * acc
    return float(out) if np.ndim(out) == 0 else out


def willmore_operator_sphere(xi, lam, s, trunc=SeriesTruncation()):
    """Leading term of the Willmore operator of an off-center sphere.

    Returns ``4 lam**-4 sum_{l=0}^{L} (l-1)(l+1)(l+2) |xi|**l P_l(s)``;
    the O(lam**-5) remainder is not modeled.  The ``l = 1`` term vanishes
    identically (translation invariance).  At ``xi = 0`` the value is
    ``-8 lam**-4`` independent of ``s``.
    """
    t = _radius(xi)
    if t >= 1.0:
        raise DomainError("|xi| must be < 1")
    if not lam > 0.0:
        raise DomainError("lambda must be positive")
    L = _cubic_weighted_degree(t, trunc)
    table = legendre_table(L, s)
    acc = 0.0
    for l in range(L, -1, -1):
        coeff = (l - 1) * (l + 1) * (l + 2)
        if coeff:
            acc = acc + coeff * t ** l * table[l]
    out = 4.0 * lam ** -4 * acc
    return float(out) if np.ndim(out) == 0 else out


def lagrange_multiplier_estimate(lam):
    """Leading-order Lagrange multiplier of the area constraint.

    Returns ``4 lam**-3``; the O(lam**-4) remainder is not modeled.
    """
    if not lam > 0.0:
        raise DomainError("lambda must be positive")
    return 4.0 * lam ** -3
