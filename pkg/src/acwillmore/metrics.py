"""Conformal metric models ``g = u**4 gbar`` with ``u = 1 + m/(2|x|) + psi``.

The catalog covers the model families used throughout the laboratory:

``schwarzschild``
    Pure (possibly translated) Schwarzschild slice, scalar-flat.
``com-oscillator``
    A ladder of compactly supported odd perturbations on geometrically
    spaced shells; the scalar curvature alternates with gaps, which makes
    the flux center and the sphere barycenter disagree along one radius
    subsequence and agree along another.
``shell`` / ``shell-sum``
    Four-amplitude perturbations on annuli at radius scale
    ``lam = k**2 * 10**(ell**2)``; amplitudes (a1, a2, a3) tune the singular
    growth of the reduced-energy gradient near the unit ball boundary and
    a4 injects a fixed asymmetry.
``glued-slow-divergence``
    Conformal gluing of shell stages into a single metric through radial
    partition profiles.

Every catalog entry supplies closed-form value, gradient, and Laplacian of
``psi``; finite differences exist only as a fallback for user-supplied
fields.  Scalar curvature uses the conformal identity
``R = -8 u**-5 lap(u)`` on the flat background.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, OutOfPlateauError, SingularityError

__all__ = [
    "BumpProfile",
    "ShellPerturbation",
    "ConformalMetricModel",
    "SchwarzschildModel",
    "OscillatorModel",
    "ShellModel",
    "ShellSumModel",
    "GluedModel",
    "CustomModel",
    "MetricDeviation",
    "OSCILLATOR_PROFILE",
    "SHELL_PROFILE",
    "GLUE_PROFILE",
    "bump_eval",
    "scalar_curvature",
    "shell_laplacian_closed_form",
    "metric_deviation",
    "mean_curvature_sphere",
    "ricci_schwarzschild_leading",
    "make_model",
    "MODEL_NAMES",
]

_E3 = np.array([0.0, 0.0, 1.0])


def _as_points(x):
    """Coerce to (N, 3); report whether the input was a single point."""
    pts = np.asarray(x, dtype=float)
    if pts.ndim == 1:
        return pts[None, :], True
    return pts, False


def _smooth_step(x):
    """C-infinity step: 0 for x <= 0, 1 for x >= 1.

    Built as ``1/(1 + exp(h))`` with ``h = 1/x - 1/(1-x)``; first and
    second derivatives are closed-form in (s, h', h'').
    """
    x = np.asarray(x, dtype=float)
    s = np.zeros_like(x)
    s[x >= 1.0] = 1.0
    inner = (x > 0.0) & (x < 1.0)
    xi = x[inner]
    h = np.clip(1.0 / xi - 1.0 / (1.0 - xi), -500.0, 500.0)
    s[inner] = 1.0 / (1.0 + np.exp(h))
    return s


def _smooth_step_derivs(x):
    """(s, s', s'') of the smooth step, vectorized."""
    x = np.asarray(x, dtype=float)
    s = _smooth_step(x)
    d1 = np.zeros_like(x)
    d2 = np.zeros_like(x)
    inner = (x > 0.0) & (x < 1.0)
    xi = x[inner]
    si = s[inner]
    h1 = -xi ** -2 - (1.0 - xi) ** -2
    h2 = 2.0 * xi ** -3 - 2.0 * (1.0 - xi) ** -3
    sp = -si * (1.0 - si) * h1
    d1[inner] = sp
    d2[inner] = -(sp * (1.0 - 2.0 * si) * h1 + si * (1.0 - si) * h2)
    return s, d1, d2


@dataclass(frozen=True)
class BumpProfile:
    """Smooth plateau profile: 0 outside ``support``, 1 on ``plateau``.

    The ramps are smooth-step transitions; the profile is C-infinity with
    closed-form first and second derivatives.
    """

    support: tuple
    plateau: tuple

    def __post_init__(self):
        s0, s1 = self.support
        p0, p1 = self.plateau
        if not (s0 < p0 < p1 < s1):
            raise ValueError("need support[0] < plateau[0] < plateau[1] "
                             "< support[1]")

    def _pieces(self, t):
        t = np.asarray(t, dtype=float)
        s0, s1 = self.support
        p0, p1 = self.plateau
        up = (t > s0) & (t < p0)
        flat = (t >= p0) & (t <= p1)
        down = (t > p1) & (t < s1)
        return t, up, flat, down

    def value(self, t):
        t, up, flat, down = self._pieces(t)
        s0, s1 = self.support
        p0, p1 = self.plateau
        out = np.zeros_like(t)
        out[flat] = 1.0
        out[up] = _smooth_step((t[up] - s0) / (p0 - s0))
        out[down] = _smooth_step((s1 - t[down]) / (s1 - p1))
        return out

    def derivative(self, t):
        t, up, flat, down = self._pieces(t)
        s0, s1 = self.support
        p0, p1 = self.plateau
        out = np.zeros_like(t)
        _, d1u, _ = _smooth_step_derivs((t[up] - s0) / (p0 - s0))
        out[up] = d1u / (p0 - s0)
        _, d1d, _ = _smooth_step_derivs((s1 - t[down]) / (s1 - p1))
        out[down] = -d1d / (s1 - p1)
        return out

    def second_derivative(self, t):
        t, up, flat, down = self._pieces(t)
        s0, s1 = self.support
        p0, p1 = self.plateau
        out = np.zeros_like(t)
        _, _, d2u = _smooth_step_derivs((t[up] - s0) / (p0 - s0))
        out[up] = d2u / (p0 - s0) ** 2
        _, _, d2d = _smooth_step_derivs((s1 - t[down]) / (s1 - p1))
        out[down] = d2d / (s1 - p1) ** 2
        return out


#: the oscillator ladder profile: plateau (3, 5), support [2, 6]
OSCILLATOR_PROFILE = BumpProfile(support=(2.0, 6.0), plateau=(3.0, 5.0))
#: the shell profile: plateau [3/4, 3], support (1/2, 4)
SHELL_PROFILE = BumpProfile(support=(0.5, 4.0), plateau=(0.75, 3.0))
#: the gluing profile: plateau [1/2, 2], support (1/3, 3)
GLUE_PROFILE = BumpProfile(support=(1.0 / 3.0, 3.0), plateau=(0.5, 2.0))


def bump_eval(profile, t, derivative=0):
    """Evaluate a :class:`BumpProfile` (or its first two derivatives).

    Returns values in [0, 1] for ``derivative=0``; scalar in, scalar out.
    """
    if derivative == 0:
        out = profile.value(t)
    elif derivative == 1:
        out = profile.derivative(t)
    elif derivative == 2:
        out = profile.second_derivative(t)
    else:
        raise ValueError("derivative must be 0, 1, or 2")
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# shell perturbations


@dataclass(frozen=True)
class ShellPerturbation:
    """Annulus perturbation at radius scale ``lam = k**2 * 10**(ell**2)``.

    eta(x) = chi_k(|x| / 10**(ell**2)) * q(x) with

    q(x) = a1 |x|**-2 + a2 lam**-1 |x|**-1 (log lam - log |x|)
         + a3 lam**-2 (log |x| - log lam) + a4 lam**-5 z**3,

    where ``chi_k`` extends the base profile's plateau through [1, k**2]:
    chi_k(t) = chi(t) for t <= 1, 1 on (1, k**2), chi(t / k**2) beyond.
    Support is contained in the annulus
    ``{ 10**(ell**2) / 2 <= |x| <= 4 k**2 10**(ell**2) }``.
    """

    k: int
    ell: int
    a: tuple
    profile: BumpProfile = SHELL_PROFILE

    def __post_init__(self):
        if self.k < 1 or self.ell < 1:
            raise ValueError("k and ell must be positive integers")
        if len(self.a) != 4:
            raise ValueError("need exactly four amplitudes")
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))

    @property
    def scale(self):
        return 10.0 ** (self.ell ** 2)

    @property
    def lam(self):
        return self.k ** 2 * 10.0 ** (self.ell ** 2)

    @property
    def support(self):
        s0, s1 = self.profile.support
        return (s0 * self.scale, s1 * self.k ** 2 * self.scale)

    @property
    def plateau(self):
        p0, p1 = self.profile.plateau
        return (p0 * self.scale, p1 * self.k ** 2 * self.scale)

    def feature_radii(self):
        s0, s1 = self.profile.support
        p0, p1 = self.profile.plateau
        inner = [s0, p0]
        outer = [p1 * self.k ** 2, s1 * self.k ** 2]
        return tuple(t * self.scale for t in inner + outer)

    # -- chi_k and its radial derivatives (arguments t = |x| / scale) ------

    def _chi_k(self, t):
        t = np.asarray(t, dtype=float)
        k2 = float(self.k ** 2)
        val = np.empty_like(t)
        low = t <= 1.0
        high = t >= k2
        mid = ~(low | high)
        val[low] = self.profile.value(t[low])
        val[mid] = 1.0
        val[high] = self.profile.value(t[high] / k2)
        return val

    def _chi_k_derivs(self, t):
        t = np.asarray(t, dtype=float)
        k2 = float(self.k ** 2)
        v = np.empty_like(t)
        d1 = np.zeros_like(t)
        d2 = np.zeros_like(t)
        low = t <= 1.0
        high = t >= k2
        mid = ~(low | high)
        v[low] = self.profile.value(t[low])
        d1[low] = self.profile.derivative(t[low])
        d2[low] = self.profile.second_derivative(t[low])
        v[mid] = 1.0
        th = t[high] / k2
        v[high] = self.profile.value(th)
        d1[high] = self.profile.derivative(th) / k2
        d2[high] = self.profile.second_derivative(th) / k2 ** 2
        return v, d1, d2

    # -- q and its derivatives ---------------------------------------------

    def _q(self, r, z):
        a1, a2, a3, a4 = self.a
        lam = self.lam
        loglam = math.log(lam)
        logr = np.log(r)
        return (a1 * r ** -2
                + a2 / lam * r ** -1 * (loglam - logr)
                + a3 / lam ** 2 * (logr - loglam)
                + a4 * lam ** -5 * z ** 3)

    def _q_grad(self, pts, r, z):
        a1, a2, a3, a4 = self.a
        lam = self.lam
        loglam = math.log(lam)
        logr = np.log(r)
        radial = (-2.0 * a1 * r ** -3
                  - a2 / lam * r ** -2 * (loglam - logr + 1.0)
                  + a3 / lam ** 2 * r ** -1)
        grad = (radial / r)[:, None] * pts
        grad[:, 2] += 3.0 * a4 * lam ** -5 * z ** 2
        return grad

    def _q_lap(self, r, z):
        a1, a2, a3, a4 = self.a
        lam = self.lam
        return (2.0 * a1 * r ** -4
                + a2 / lam * r ** -3
                + a3 / lam ** 2 * r ** -2
                + 6.0 * a4 * lam ** -5 * z)

    # -- eta = chi_k * q ----------------------------------------------------

    def eta(self, x):
        pts, single = _as_points(x)
        r = np.linalg.norm(pts, axis=1)
        out = np.zeros(len(pts))
        s0, s1 = self.support
        m = (r > s0) & (r < s1)
        if np.any(m):
            chi = self._chi_k(r[m] / self.scale)
            out[m] = chi * self._q(r[m], pts[m, 2])
        return out[0] if single else out

    def eta_grad(self, x):
        pts, single = _as_points(x)
        r = np.linalg.norm(pts, axis=1)
        out = np.zeros((len(pts), 3))
        s0, s1 = self.support
        m = (r > s0) & (r < s1)
        if np.any(m):
            p = pts[m]
            rm = r[m]
            z = p[:, 2]
            chi, dchi, _ = self._chi_k_derivs(rm / self.scale)
            dchi = dchi / self.scale
            q = self._q(rm, z)
            qg = self._q_grad(p, rm, z)
            out[m] = chi[:, None] * qg + (q * dchi / rm)[:, None] * p
        return out[0] if single else out

    def eta_lap(self, x):
        pts, single = _as_points(x)
        r = np.linalg.norm(pts, axis=1)
        out = np.zeros(len(pts))
        s0, s1 = self.support
        m = (r > s0) & (r < s1)
        if np.any(m):
            p = pts[m]
            rm = r[m]
            z = p[:, 2]
            chi, dchi, d2chi = self._chi_k_derivs(rm / self.scale)
            dchi = dchi / self.scale
            d2chi = d2chi / self.scale ** 2
            q = self._q(rm, z)
            qg = self._q_grad(p, rm, z)
            qlap = self._q_lap(rm, z)
            rdotq = (p * qg).sum(axis=1) / rm
            out[m] = (chi * qlap + 2.0 * dchi * rdotq
                      + q * (d2chi + 2.0 * dchi / rm))
        return out[0] if single else out


def shell_laplacian_closed_form(shell, x):
    """Plateau Laplacian of the shell perturbation.

    Valid only on the conservative plateau ``k**-2 <= |x|/lam <= 2`` where
    the profile is identically 1:

    lap eta = 2 a1 |x|**-4 + a2 lam**-1 |x|**-3 + a3 lam**-2 |x|**-2
              + 6 a4 lam**-5 z.

    Raises :class:`OutOfPlateauError` outside that region.
    """
    pts, single = _as_points(x)
    r = np.linalg.norm(pts, axis=1)
    ratio = r / shell.lam
    if np.any(ratio < shell.k ** -2 - 1e-12) or np.any(ratio > 2.0 + 1e-12):
        raise OutOfPlateauError(
            "point outside the plateau k**-2 <= |x|/lam <= 2")
    out = shell._q_lap(r, pts[:, 2])
    return float(out[0]) if single else out


# ---------------------------------------------------------------------------
# models


class ConformalMetricModel:
    """Base class: conformal metric ``g = u**4 gbar``.

    Subclasses implement ``psi``, and either override ``psi_grad`` and
    ``psi_lap`` with closed forms (all catalog entries do) or inherit the
    central finite-difference fallbacks with relative step 1e-4.

    Attributes
    ----------
    name : str
    mass : float
        ADM mass parameter m in ``u = 1 + m/(2|x|) + psi`` (catalog uses 2).
    c_psi : float
        Decay constant: ``|psi| <= c_psi |x|**-2`` on the model's domain.
    """

    name = "model"
    mass = 2.0
    c_psi = 0.0

    # -- perturbation ------------------------------------------------------

    def psi(self, x):
        raise NotImplementedError

    def psi_grad(self, x):
        pts, single = _as_points(x)
        out = np.zeros((len(pts), 3))
        r = np.linalg.norm(pts, axis=1)
        h = np.maximum(1e-4 * r, 1e-6)
        for i in range(3):
            e = np.zeros(3)
            e[i] = 1.0
            out[:, i] = (self.psi(pts + h[:, None] * e)
                         - self.psi(pts - h[:, None] * e)) / (2.0 * h)
        return out[0] if single else out

    def psi_lap(self, x):
        pts, single = _as_points(x)
        r = np.linalg.norm(pts, axis=1)
        h = np.maximum(1e-4 * r, 1e-6)
        center = self.psi(pts)
        acc = np.zeros(len(pts))
        for i in range(3):
            e = np.zeros(3)
            e[i] = 1.0
            acc += (self.psi(pts + h[:, None] * e)
                    + self.psi(pts - h[:, None] * e) - 2.0 * center)
        out = acc / h ** 2
        return out[0] if single else out

    # -- conformal factor --------------------------------------------------

    def u(self, x):
        pts, single = _as_points(x)
        r = np.linalg.norm(pts, axis=1)
        out = 1.0 + self.mass / (2.0 * r) + np.asarray(self.psi(pts))
        return float(out[0]) if single else out

    def u_grad(self, x):
        pts, single = _as_points(x)
        r = np.linalg.norm(pts, axis=1)
        out = (-self.mass / 2.0 / r ** 3)[:, None] * pts \
            + np.asarray(self.psi_grad(pts))
        return out[0] if single else out

    def u_lap(self, x):
        # the monopole m/(2|x|) is harmonic away from the origin
        return self.psi_lap(x)

    # -- declarations for quadrature and flux ------------------------------

    def curvature_support(self):
        """Annuli (s0, s1) in |x| outside which R vanishes identically.

        ``None`` means unbounded support (a decay envelope must then be
        supplied by :meth:`curvature_decay`); an empty tuple means R = 0
        everywhere.
        """
        return None

    def curvature_decay(self):
        """(C, p) with |R| <= C |x|**-p, for unbounded curvature support."""
        return None

    def feature_radii(self):
        """Radii of profile transitions, for quadrature panel placement."""
        return ()


class SchwarzschildModel(ConformalMetricModel):
    """(Translated) Schwarzschild slice: ``u = 1 + m/(2|x - c|)``.

    Scalar-flat: ``u`` is harmonic away from the puncture, so R = 0
    exactly everywhere it is defined.  ``mass=0`` gives the flat model.
    """

    def __init__(self, mass=2.0, center=(0.0, 0.0, 0.0)):
        self.mass = float(mass)
        self.center = np.asarray(center, dtype=float)
        self.translated = bool(np.any(self.center != 0.0))
        self.name = "schwarzschild" if self.mass != 0.0 else "flat"
        self.c_psi = abs(self.mass) * float(np.linalg.norm(self.center)) + 1.0

    # psi absorbs the difference between the translated monopole and the
    # centered one that the base class adds
    def psi(self, x):
        pts, single = _as_points(x)
        if not self.translated:
            out = np.zeros(len(pts))
            return out[0] if single else out
        r = np.linalg.norm(pts, axis=1)
        rc = np.linalg.norm(pts - self.center[None, :], axis=1)
        out = self.mass / 2.0 * (1.0 / rc - 1.0 / r)
        return out[0] if single else out

    def psi_grad(self, x):
        pts, single = _as_points(x)
        if not self.translated:
            out = np.zeros((len(pts), 3))
            return out[0] if single else out
        r = np.linalg.norm(pts, axis=1)
        d = pts - self.center[None, :]
        rc = np.linalg.norm(d, axis=1)
        out = self.mass / 2.0 * (-d / rc[:, None] ** 3
                                 + pts / r[:, None] ** 3)
        return out[0] if single else out

    def psi_lap(self, x):
        pts, single = _as_points(x)
        out = np.zeros(len(pts))
        return out[0] if single else out

    def curvature_support(self):
        return ()


class OscillatorModel(ConformalMetricModel):
    """Odd perturbation ladder:  psi = -amplitude * eta(x) * z |x|**-4.

    ``eta(x) = sum_k chi(|x| / (scale 10**k))`` for k in
    [k_min, k_max], with the plateau-(3,5) profile.  The scalar curvature
    is ``+4 u**-5 z |x|**-6`` on each plateau (odd in z) and vanishes
    identically in the gaps between shells.
    """

    def __init__(self, amplitude=0.125, scale=1.0, k_min=0, k_max=4,
                 profile=OSCILLATOR_PROFILE):
        if k_max < k_min:
            raise ValueError("k_max must be >= k_min")
        self.amplitude = float(amplitude)
        self.scale = float(scale)
        self.k_min = int(k_min)
        self.k_max = int(k_max)
        self.profile = profile
        self.name = "com-oscillator"
        self.c_psi = abs(self.amplitude)
        self.shell_scales = tuple(self.scale * 10.0 ** k
                                  for k in range(self.k_min, self.k_max + 1))

    def _eta_derivs(self, r):
        """(w, w', w'') where w(r) = sum_k chi(r / s_k)."""
        w = np.zeros_like(r)
        d1 = np.zeros_like(r)
        d2 = np.zeros_like(r)
        s0, s1 = self.profile.support
        for s in self.shell_scales:
            m = (r > s0 * s) & (r < s1 * s)
            if np.any(m):
                t = r[m] / s
                w[m] += self.profile.value(t)
                d1[m] += self.profile.derivative(t) / s
                d2[m] += self.profile.second_derivative(t) / s ** 2
        return w, d1, d2

    def psi(self, x):
        pts, single = _as_points(x)
        r = np.linalg.norm(pts, axis=1)
        w, _, _ = self._eta_derivs(r)
        out = -self.amplitude * w * pts[:, 2] * r ** -4
        return out[0] if single else out

    def psi_grad(self, x):
        pts, single = _as_points(x)
        r = np.linalg.norm(pts, axis=1)
        z = pts[:, 2]
        w, d1, _ = self._eta_derivs(r)
        # grad(z r**-4) = r**-4 e3 - 4 z r**-6 x;  plus the ramp term
        out = np.zeros((len(pts), 3))
        out[:, 2] = w * r ** -4
        out += ((-4.0 * w * z * r ** -6 + d1 * z * r ** -5)[:, None]) * pts
        out *= -self.amplitude
        return out[0] if single else out

    def psi_lap(self, x):
        pts, single = _as_points(x)
        r = np.linalg.norm(pts, axis=1)
        z = pts[:, 2]
        w, d1, d2 = self._eta_derivs(r)
        out = -self.amplitude * z * (4.0 * w * r ** -6
                                     - 4.0 * d1 * r ** -5
                                     + d2 * r ** -4)
        return out[0] if single else out

    def curvature_support(self):
        s0, s1 = self.profile.support
        return tuple((s0 * s, s1 * s) for s in self.shell_scales)

    def feature_radii(self):
        s0, s1 = self.profile.support
        p0, p1 = self.profile.plateau
        out = []
        for s in self.shell_scales:
            out.extend(t * s for t in (s0, p0, p1, s1))
        return tuple(sorted(out))


class ShellModel(ConformalMetricModel):
    """Single shell perturbation:  psi = eta_{k,ell} / 2."""

    def __init__(self, shell):
        self.shell = shell
        self.name = "shell"
        a_sum = sum(abs(v) for v in shell.a)
        self.c_psi = 2000.0 * a_sum  # measured envelope constant, generous

    def psi(self, x):
        return 0.5 * self.shell.eta(x)

    def psi_grad(self, x):
        return 0.5 * self.shell.eta_grad(x)

    def psi_lap(self, x):
        return 0.5 * self.shell.eta_lap(x)

    def curvature_support(self):
        return (self.shell.support,)

    def feature_radii(self):
        return self.shell.feature_radii()


class ShellSumModel(ConformalMetricModel):
    """Disjoint shell sum:  psi = (1/2) sum_{i=1..i_max} eta_{k,i}.

    Construction asserts pairwise disjoint supports (interval arithmetic on
    the declared annuli), so all evaluations are local to one shell.
    """

    def __init__(self, k, i_max, a):
        self.shells = tuple(ShellPerturbation(k=k, ell=i, a=a)
                            for i in range(1, i_max + 1))
        for s, t in zip(self.shells[:-1], self.shells[1:]):
            if s.support[1] >= t.support[0]:
                raise ValueError("shell supports are not disjoint")
        self.k = k
        self.name = "shell-sum"
        a_sum = sum(abs(v) for v in a)
        self.c_psi = 2000.0 * a_sum

    def psi(self, x):
        pts, single = _as_points(x)
        out = np.zeros(len(pts))
        for s in self.shells:
            out += 0.5 * s.eta(pts)
        return out[0] if single else out

    def psi_grad(self, x):
        pts, single = _as_points(x)
        out = np.zeros((len(pts), 3))
        for s in self.shells:
            out += 0.5 * s.eta_grad(pts)
        return out[0] if single else out

    def psi_lap(self, x):
        pts, single = _as_points(x)
        out = np.zeros(len(pts))
        for s in self.shells:
            out += 0.5 * s.eta_lap(pts)
        return out[0] if single else out

    def curvature_support(self):
        return tuple(s.support for s in self.shells)

    def feature_radii(self):
        out = []
        for s in self.shells:
            out.extend(s.feature_radii())
        return tuple(sorted(out))


class GluedModel(ConformalMetricModel):
    """Radially glued shell stages.

    Each stage carries a shell-sum perturbation ``p_k`` and a gluing window
    [rho, theta]; with ``ubar = 1 + 1/|x|`` and ``u_k = ubar + p_k`` the
    glued conformal factor is

        u = W**(1/4),   W = ubar**4 + sum_k gamma_k(|x|) (u_k**4 - ubar**4),

    where ``gamma_k`` ramps 0 -> 1 across [rho/3, rho/2] and 1 -> 0 across
    [2 theta, 3 theta] (plateau-(1/2,2) profile rescaled at each end).  The
    metric agrees with stage k's metric on [rho/2, 2 theta] and with
    Schwarzschild wherever every ``gamma_k (u_k**4 - ubar**4)`` vanishes.
    """

    def __init__(self, stages):
        # stages: sequence of dicts with keys k, ells, a, rho, theta
        self.stages = []
        for st in stages:
            shells = tuple(ShellPerturbation(k=st["k"], ell=e, a=st["a"])
                           for e in st["ells"])
            rho = float(st["rho"])
            theta = float(st["theta"])
            if not rho < theta:
                raise ValueError("stage needs rho < theta")
            self.stages.append({"shells": shells, "rho": rho,
                                "theta": theta})
        self.name = "glued-slow-divergence"
        self.c_psi = 2000.0 * max(
            (sum(abs(v) for v in st["shells"][0].a) for st in self.stages),
            default=1.0)

    # -- stage helpers -----------------------------------------------------

    @staticmethod
    def _gamma(stage, r):
        """(gamma, gamma', gamma'') of the stage glue at radii r."""
        rho, theta = stage["rho"], stage["theta"]
        g = np.zeros_like(r)
        d1 = np.zeros_like(r)
        d2 = np.zeros_like(r)
        low = r < rho
        mid = (r >= rho) & (r <= theta)
        high = r > theta
        g[mid] = 1.0
        t = r[low] / rho
        g[low] = GLUE_PROFILE.value(t)
        d1[low] = GLUE_PROFILE.derivative(t) / rho
        d2[low] = GLUE_PROFILE.second_derivative(t) / rho ** 2
        t = r[high] / theta
        g[high] = GLUE_PROFILE.value(t)
        d1[high] = GLUE_PROFILE.derivative(t) / theta
        d2[high] = GLUE_PROFILE.second_derivative(t) / theta ** 2
        return g, d1, d2

    @staticmethod
    def _stage_p(stage, pts):
        val = np.zeros(len(pts))
        grad = np.zeros((len(pts), 3))
        lap = np.zeros(len(pts))
        for s in stage["shells"]:
            val += 0.5 * s.eta(pts)
            grad += 0.5 * s.eta_grad(pts)
            lap += 0.5 * s.eta_lap(pts)
        return val, grad, lap

    def _w_and_derivs(self, pts):
        r = np.linalg.norm(pts, axis=1)
        ubar = 1.0 + 1.0 / r
        gub = (-1.0 / r ** 3)[:, None] * pts
        W = ubar ** 4
        gW = 4.0 * (ubar ** 3)[:, None] * gub
        lW = 12.0 * ubar ** 2 * r ** -4
        for stage in self.stages:
            gam, dgam, d2gam = self._gamma(stage, r)
            active = gam > 0.0
            if not np.any(active):
                continue
            p, gp, lp = self._stage_p(stage, pts)
            v = ubar + p
            d = v ** 4 - ubar ** 4
            gv = gub + gp
            gd = 4.0 * (v ** 3)[:, None] * gv - 4.0 * (ubar ** 3)[:, None] * gub
            ld = (4.0 * v ** 3 * lp
                  + 12.0 * v ** 2 * (gv * gv).sum(axis=1)
                  - 12.0 * ubar ** 2 * r ** -4)
            xhat = pts / r[:, None]
            W = W + gam * d
            gW = gW + gam[:, None] * gd + (dgam * d)[:, None] * xhat
            lW = (lW + gam * ld + 2.0 * dgam * (xhat * gd).sum(axis=1)
                  + d * (d2gam + 2.0 * dgam / r))
        return r, ubar, W, gW, lW

    def psi(self, x):
        pts, single = _as_points(x)
        r, ubar, W, _, _ = self._w_and_derivs(pts)
        out = W ** 0.25 - ubar
        return out[0] if single else out

    def psi_grad(self, x):
        pts, single = _as_points(x)
        r, ubar, W, gW, _ = self._w_and_derivs(pts)
        out = 0.25 * (W ** -0.75)[:, None] * gW \
            - (-1.0 / r ** 3)[:, None] * pts
        return out[0] if single else out

    def psi_lap(self, x):
        pts, single = _as_points(x)
        r, ubar, W, gW, lW = self._w_and_derivs(pts)
        out = (0.25 * W ** -0.75 * lW
               - 0.1875 * W ** -1.75 * (gW * gW).sum(axis=1))
        return out[0] if single else out

    def curvature_support(self):
        out = []
        for stage in self.stages:
            lo = stage["rho"] / 3.0
            hi = 3.0 * stage["theta"]
            for s in stage["shells"]:
                a, b = s.support
                a, b = max(a, lo), min(b, hi)
                if b > a:
                    out.append((a, b))
        return tuple(out)

    def feature_radii(self):
        out = []
        for stage in self.stages:
            rho, theta = stage["rho"], stage["theta"]
            out.extend([rho / 3.0, rho / 2.0, 2.0 * theta, 3.0 * theta])
            for s in stage["shells"]:
                out.extend(s.feature_radii())
        return tuple(sorted(out))


class CustomModel(ConformalMetricModel):
    """User-supplied perturbation; gradient/Laplacian fall back to FD."""

    def __init__(self, psi, psi_grad=None, psi_lap=None, mass=2.0,
                 c_psi=1.0, support=None, decay=None, name="custom"):
        self._psi = psi
        self._grad = psi_grad
        self._lap = psi_lap
        self.mass = float(mass)
        self.c_psi = float(c_psi)
        self._support = support
        self._decay = decay
        self.name = name

    def psi(self, x):
        pts, single = _as_points(x)
        out = np.asarray(self._psi(pts), dtype=float)
        return out[0] if single else out

    def psi_grad(self, x):
        if self._grad is None:
            return super().psi_grad(x)
        pts, single = _as_points(x)
        out = np.asarray(self._grad(pts), dtype=float)
        return out[0] if single else out

    def psi_lap(self, x):
        if self._lap is None:
            return super().psi_lap(x)
        pts, single = _as_points(x)
        out = np.asarray(self._lap(pts), dtype=float)
        return out[0] if single else out

    def curvature_support(self):
        return self._support

    def curvature_decay(self):
        return self._decay


# ---------------------------------------------------------------------------
# pointwise geometry operations


def _check_outside_unit(r):
    if np.any(r <= 1.0):
        raise SingularityError("evaluation requires |x| > 1")


def scalar_curvature(model, x):
    """Scalar curvature of ``g = u**4 gbar``:  ``R = -8 u**-5 lap(u)``.

    Exact when the model's Laplacian is closed-form (all catalog entries);
    finite-difference based otherwise.  Raises :class:`SingularityError`
    for ``|x| <= 1``.
    """
    pts, single = _as_points(x)
    r = np.linalg.norm(pts, axis=1)
    _check_outside_unit(r)
    u = 1.0 + model.mass / (2.0 * r) + np.asarray(model.psi(pts))
    out = -8.0 * u ** -5 * np.asarray(model.psi_lap(pts))
    return float(out[0]) if single else out


@dataclass
class MetricDeviation:
    """Deviation of the metric from flat and from reference Schwarzschild.

    ``h = (u**4 - 1) I`` and ``sigma = (u**4 - (1 + 1/|x|)**4) I`` with
    their first spatial derivatives ``dh[a, i, j] = d_a h_ij`` (closed-form
    chain rule over the model's psi gradient).  The reference Schwarzschild
    factor is the mass-2 normalization regardless of the model's mass.
    """

    h: np.ndarray
    sigma: np.ndarray
    dh: np.ndarray
    dsigma: np.ndarray


def metric_deviation(model, x):
    """Compute :class:`MetricDeviation` at a point (or batch of points)."""
    pts, single = _as_points(x)
    r = np.linalg.norm(pts, axis=1)
    _check_outside_unit(r)
    n = len(pts)
    u = 1.0 + model.mass / (2.0 * r) + np.asarray(model.psi(pts))
    du = (-model.mass / 2.0 / r ** 3)[:, None] * pts \
        + np.asarray(model.psi_grad(pts))
    ubar = 1.0 + 1.0 / r
    dubar = (-1.0 / r ** 3)[:, None] * pts

    eye = np.eye(3)
    h = (u ** 4 - 1.0)[:, None, None] * eye
    sigma = (u ** 4 - ubar ** 4)[:, None, None] * eye
    dF = 4.0 * (u ** 3)[:, None] * du
    dFs = dF - 4.0 * (ubar ** 3)[:, None] * dubar
    dh = dF[:, :, None, None] * eye
    dsigma = dFs[:, :, None, None] * eye
    if single:
        return MetricDeviation(h=h[0], sigma=sigma[0], dh=dh[0],
                               dsigma=dsigma[0])
    return MetricDeviation(h=h, sigma=sigma, dh=dh, dsigma=dsigma)


def mean_curvature_sphere(model, center, radius, direction):
    """Mean curvature of a coordinate sphere at ``center + radius*direction``.

    Conformal transformation of the Euclidean sphere:
    ``H = u**-2 (2/radius) + 4 u**-3 (nubar . grad u)`` with outward unit
    normal ``nubar = direction``.  ``direction`` may be a single unit
    vector or an (N, 3) batch.
    """
    center = np.asarray(center, dtype=float)
    if not (np.isfinite(radius) and radius > 0.0):
        raise ValueError("radius must be positive")
    dmin = abs(float(np.linalg.norm(center)) - radius)
    if dmin < 1.0 - 1e-12:
        raise SingularityError("sphere meets the region |x| < 1")
    nu, single = _as_points(direction)
    pts = center[None, :] + radius * nu
    r = np.linalg.norm(pts, axis=1)
    u = 1.0 + model.mass / (2.0 * r) + np.asarray(model.psi(pts))
    du = (-model.mass / 2.0 / r ** 3)[:, None] * pts \
        + np.asarray(model.psi_grad(pts))
    dn = (nu * du).sum(axis=1)
    out = u ** -2 * (2.0 / radius) + 4.0 * u ** -3 * dn
    return float(out[0]) if single else out


def ricci_schwarzschild_leading(x):
    """Leading Schwarzschild Ricci term ``2|x|**-3 (I - 3 xhat xhat^T)``.

    Trace-free by construction; the remainder of the exact Ricci tensor is
    O(|x|**-4).
    """
    pts, single = _as_points(x)
    r = np.linalg.norm(pts, axis=1)
    _check_outside_unit(r)
    xhat = pts / r[:, None]
    eye = np.eye(3)
    out = 2.0 * (r ** -3)[:, None, None] \
        * (eye[None, :, :] - 3.0 * xhat[:, :, None] * xhat[:, None, :])
    return out[0] if single else out


# ---------------------------------------------------------------------------
# catalog

MODEL_NAMES = ("schwarzschild", "com-oscillator", "shell", "shell-sum",
               "glued-slow-divergence")

_SD_DEFAULT_STAGES = (
    {"k": 3, "ells": (2,), "a": (2.0, 3.0, 5.0, 0.0),
     "rho": 5.0e3, "theta": 4.0e5},
)


def make_model(name, **params):
    """Instantiate a catalog metric by name.

    Names and parameters:

    - ``schwarzschild``: mass (default 2), center (default origin)
    - ``com-oscillator``: amplitude (default 1/8), scale (default 1),
      k_min (default 0), k_max (default 4)
    - ``shell``: k, ell, a (4 amplitudes)
    - ``shell-sum``: k, i_max (default 3), a
    - ``glued-slow-divergence``: stages (list of {k, ells, a, rho, theta});
      defaults to a single stage carrying the slow-divergence amplitudes
    """
    if name == "schwarzschild":
        return SchwarzschildModel(mass=params.get("mass", 2.0),
                                  center=params.get("center", (0.0, 0.0, 0.0)))
    if name == "com-oscillator":
        return OscillatorModel(amplitude=params.get("amplitude", 0.125),
                               scale=params.get("scale", 1.0),
                               k_min=params.get("k_min", 0),
                               k_max=params.get("k_max", 4))
    if name == "shell":
        shell = ShellPerturbation(k=params["k"], ell=params["ell"],
                                  a=tuple(params["a"]))
        return ShellModel(shell)
    if name == "shell-sum":
        return ShellSumModel(k=params["k"], i_max=params.get("i_max", 3),
                             a=tuple(params["a"]))
    if name == "glued-slow-divergence":
        return GluedModel(params.get("stages", _SD_DEFAULT_STAGES))
    raise DomainError(f"unknown catalog metric {name!r}; "
                     f"known: {', '.join(MODEL_NAMES)}")
