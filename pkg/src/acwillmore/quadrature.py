"""Deterministic quadrature on spheres and exterior domains.

All reductions in this module use a fixed-order compensated summation so that
results are bit-identical run to run and independent of BLAS thread counts:
the integration paths contain no matmul/einsum, only elementwise kernels and
fixed-shape partial sums combined by Kahan accumulation in a fixed order.

Spheres are integrated with a product rule: Gauss-Legendre panels in the
cosine of the polar angle times a uniform azimuthal grid.  The polar axis is
aligned with the direction from the coordinate origin to the sphere center
(so circles of constant distance-to-origin are coordinate lines), which lets
callers place panel breakpoints exactly where an integrand has radial
features, and lets a geometric ladder of panels resolve power-law integrands
on spheres that pass close to the origin.

Exterior domains (complement of a ball) are integrated as a one-dimensional
rule over concentric sphere radii, Gauss-Legendre in the logarithm of the
radius, restricted to declared support windows; fields with unbounded support
must declare a decay envelope ``|f| <= C |x|**-p`` with ``p >= 4`` and the
tail beyond the last window is handled on an inverted-coordinate panel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_legendre

__all__ = [
    "SphereRule",
    "ExteriorRule",
    "compensated_sum",
    "build_sphere_rule",
    "build_exterior_rule",
    "integrate_sphere",
    "integrate_exterior",
    "integrate_hemisphere",
    "polar_breaks_for_radii",
    "octave_ladder",
]

_BLOCK = 256

_E3 = np.array([0.0, 0.0, 1.0])


def compensated_sum(values, axis=-1):
    """Sum ``values`` along ``axis`` with a fixed-order compensated reduction.

    The axis is consumed in fixed-size blocks; each block is reduced by
    numpy's pairwise summation (deterministic for a fixed shape and dtype)
    and the block results are combined by Kahan accumulation in block order.
    The result is therefore independent of threading libraries and identical
    across repeated runs.

    Parameters
    ----------
    values : array_like
        Input array; reduced along ``axis``.
    axis : int
        Axis to reduce (default last).

    Returns
    -------
    ndarray or float
        Array with ``axis`` removed (scalar if the input was 1-d).
    """
    v = np.moveaxis(np.asarray(values, dtype=float), axis, -1)
    n = v.shape[-1]
    total = np.zeros(v.shape[:-1])
    carry = np.zeros_like(total)
    for start in range(0, n, _BLOCK):
        part = v[..., start:start + _BLOCK].sum(axis=-1)
        y = part - carry
        t = total + y
        carry = (t - total) - y
        total = t
    if total.ndim == 0:
        return float(total)
    return total


def _orthonormal_frame(axis):
    """Right-handed frame (u, v, axis) with a deterministic transverse pair."""
    a = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(a)
    if not np.isfinite(norm) or norm == 0.0:
        raise ValueError("polar axis must be a nonzero finite vector")
    a = a / norm
    helper = _E3 if abs(a[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    u = helper - np.dot(helper, a) * a
    u /= np.linalg.norm(u)
    v = np.cross(a, u)
    return u, v, a


def polar_breaks_for_radii(center, radius, radii):
    """Cosine-of-polar-angle breakpoints where ``|x|`` crosses given radii.

    On the sphere of the given center and radius, with polar axis pointing
    from the origin to the center, the distance to the origin is monotone in
    the polar angle:  ``|x|**2 = radius**2 + D**2 + 2 radius D cos(theta)``
    with ``D = |center|``.  Returns the sorted interior breakpoints in
    ``(-1, 1)`` at which ``|x|`` equals each requested radius, for use as
    Gauss-Legendre panel boundaries.
    """
    center = np.asarray(center, dtype=float)
    dist = float(np.linalg.norm(center))
    if dist == 0.0:
        return ()
    breaks = []
    for s in radii:
        c = (s * s - radius * radius - dist * dist) / (2.0 * radius * dist)
        if -1.0 + 1e-12 < c < 1.0 - 1e-12:
            breaks.append(c)
    return tuple(sorted(breaks))


def octave_ladder(r_lo, r_hi, base=2.0):
    """Radii ``r_lo * base**j`` strictly inside ``(r_lo, r_hi)``.

    Used to grade panels for power-law integrands: each resulting panel spans
    at most one factor of ``base`` in distance to the origin, which keeps a
    fixed-order Gauss rule spectrally accurate however close ``r_lo`` is to
    zero relative to ``r_hi``.
    """
    if r_lo <= 0.0 or r_hi <= r_lo:
        return ()
    out = []
    r = r_lo * base
    while r < r_hi * (1.0 - 1e-12):
        out.append(r)
        r *= base
    return tuple(out)


@dataclass
class SphereRule:
    """Product quadrature rule on a coordinate sphere.

    Attributes
    ----------
    center : ndarray, shape (3,)
        Sphere center.
    radius : float
        Sphere radius.
    n_polar, n_azimuth : int
        Gauss-Legendre order per polar panel and number of azimuthal nodes.
    cos_breaks : tuple of float
        Interior panel boundaries in the cosine of the polar angle.
    axis : ndarray, shape (3,)
        Polar axis (unit).
    nodes : ndarray, shape (N, 3)
        Quadrature nodes in ambient coordinates.
    weights : ndarray, shape (N,)
        Quadrature weights including the ``radius**2`` area factor; they sum
        to the sphere area ``4 pi radius**2``.
    normals : ndarray, shape (N, 3)
        Outward unit normals ``(x - center)/radius`` at the nodes.
    """

    center: np.ndarray
    radius: float
    n_polar: int
    n_azimuth: int
    cos_breaks: tuple = ()
    axis: np.ndarray = field(default=None)
    nodes: np.ndarray = field(default=None, repr=False)
    weights: np.ndarray = field(default=None, repr=False)
    normals: np.ndarray = field(default=None, repr=False)


def _panel_nodes(edges, n_polar):
    """GL nodes/weights on each panel of ``edges``, concatenated in order."""
    x, w = roots_legendre(n_polar)
    cs, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        cs.append(mid + half * x)
        ws.append(half * w)
    return np.concatenate(cs), np.concatenate(ws)


def build_sphere_rule(center, radius, n_polar=48, n_azimuth=96,
                      cos_breaks=(), axis=None):
    """Construct a :class:`SphereRule`.

    The polar axis defaults to the direction from the origin to ``center``
    (so ``cos_breaks`` computed by :func:`polar_breaks_for_radii` line up
    with panel boundaries), or to the z axis for an origin-centered sphere.
    ``n_polar`` Gauss-Legendre nodes are placed on every polar panel.
    """
    center = np.asarray(center, dtype=float)
    if center.shape != (3,) or not np.all(np.isfinite(center)):
        raise ValueError("center must be a finite 3-vector")
    if not (np.isfinite(radius) and radius > 0.0):
        raise ValueError("radius must be positive and finite")
    if n_polar < 2 or n_azimuth < 4:
        raise ValueError("rule resolution too small")
    if axis is None:
        axis = center if np.linalg.norm(center) > 0.0 else _E3
    u, v, a = _orthonormal_frame(axis)

    edges = [-1.0]
    for b in sorted(cos_breaks):
        if not (-1.0 < b < 1.0):
            raise ValueError("cos_breaks must lie strictly inside (-1, 1)")
        if b - edges[-1] > 1e-14:
            edges.append(float(b))
    edges.append(1.0)

    cosq, wq = _panel_nodes(edges, n_polar)
    sinq = np.sqrt(np.clip(1.0 - cosq * cosq, 0.0, None))
    phi = 2.0 * np.pi * np.arange(n_azimuth) / n_azimuth

    # node layout: polar-major, azimuth fastest; fixed order for determinism
    cosp = np.repeat(cosq, n_azimuth)
    sinp = np.repeat(sinq, n_azimuth)
    cphi = np.tile(np.cos(phi), cosq.size)
    sphi = np.tile(np.sin(phi), cosq.size)

    normals = (np.outer(cosp, a)
               + sinp[:, None] * (cphi[:, None] * u + sphi[:, None] * v))
    nodes = center[None, :] + radius * normals
    weights = np.repeat(wq, n_azimuth) * (2.0 * np.pi / n_azimuth) * radius ** 2

    return SphereRule(center=center, radius=float(radius), n_polar=n_polar,
                      n_azimuth=n_azimuth, cos_breaks=tuple(sorted(cos_breaks)),
                      axis=a, nodes=nodes, weights=weights, normals=normals)


def integrate_sphere(f, rule):
    """Integrate a scalar or vector field over a sphere.

    Parameters
    ----------
    f : callable
        Maps an ``(N, 3)`` array of points to an ``(N,)`` or ``(N, k)``
        array of values.  Vector integrands against the outward normal can
        be formed with ``rule.normals``.
    rule : SphereRule

    Returns
    -------
    float or ndarray
        The surface integral; shape ``()`` or ``(k,)``.
    """
    vals = np.asarray(f(rule.nodes), dtype=float)
    if vals.shape[0] != rule.nodes.shape[0]:
        raise ValueError("integrand returned wrong leading dimension")
    if vals.ndim == 1:
        return compensated_sum(rule.weights * vals, axis=0)
    return compensated_sum(rule.weights[:, None] * vals, axis=0)


def integrate_hemisphere(f, rule, axis, sign=1):
    """Integrate over the hemisphere ``sign * axis . (x - center) >= 0``.

    ``rule`` supplies the sphere (center, radius) and resolution; a fresh
    grid is built with its polar axis rotated onto ``axis`` and split into
    Gauss-Legendre panels on ``[-1, 0]`` and ``[0, 1]`` of the cosine, so no
    quadrature cell straddles the equator.  Because the panel rules are
    open, no node ever lies exactly on the equator and the conventional
    half-weight treatment of equatorial ties never has to fire; the two
    hemispheres partition the sphere rule exactly.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    aligned = build_sphere_rule(rule.center, rule.radius,
                                n_polar=rule.n_polar,
                                n_azimuth=rule.n_azimuth,
                                cos_breaks=(0.0,), axis=axis)
    side = sign * ((aligned.nodes - aligned.center[None, :])
                   * aligned.axis).sum(axis=1)
    mask = side >= 0.0
    vals = np.asarray(f(aligned.nodes[mask]), dtype=float)
    w = aligned.weights[mask]
    if vals.ndim == 1:
        return compensated_sum(w * vals, axis=0)
    return compensated_sum(w[:, None] * vals, axis=0)


@dataclass
class ExteriorRule:
    """Quadrature rule for the exterior of a ball.

    The region ``|x - center| >= r_inner`` is sliced into concentric spheres;
    the radial direction carries Gauss-Legendre panels in ``log r``, clipped
    to the declared support of the integrand, and each radial node carries a
    :class:`SphereRule`.

    Attributes
    ----------
    center : ndarray, shape (3,)
    r_inner : float
    panels : tuple of (float, float)
        Radial panels (in sphere radius measured from ``center``).
    radial_nodes, radial_weights : ndarray
        Flattened log-Gauss radial nodes and weights (including the
        ``dr`` substitution factor).
    tail : tuple or None
        ``(r_cut, C, p)`` when a decay envelope handles an unbounded tail.
    n_polar, n_azimuth : int
        Angular resolution used on every sphere slice.
    feature_radii : tuple
        Distances from the origin at which integrands may have radial
        features; used for polar panel breakpoints on every slice.
    """

    center: np.ndarray
    r_inner: float
    panels: tuple
    radial_nodes: np.ndarray = field(repr=False, default=None)
    radial_weights: np.ndarray = field(repr=False, default=None)
    tail: tuple = None
    n_polar: int = 24
    n_azimuth: int = 48
    feature_radii: tuple = ()


def _merge_windows(windows):
    out = []
    for lo, hi in sorted((float(a), float(b)) for a, b in windows):
        if out and lo <= out[-1][1] * (1.0 + 1e-12):
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return [(a, b) for a, b in out if b > a]


def build_exterior_rule(center, r_inner, support=None, decay=None,
                        feature_radii=(), n_radial=24, n_polar=24,
                        n_azimuth=48, max_panel_octaves=1.0):
    """Construct an :class:`ExteriorRule` for ``|x - center| >= r_inner``.

    Parameters
    ----------
    center : array_like, shape (3,)
    r_inner : float
        Inner boundary radius (the excluded ball's radius).
    support : sequence of (s0, s1), optional
        Annuli ``s0 <= |x| <= s1`` (distances from the origin) outside of
        which the integrand vanishes identically.  Radial integration is
        restricted to sphere radii that can meet these annuli; gaps are
        skipped exactly.
    decay : (C, p), optional
        Envelope ``|f(x)| <= C |x|**-p`` with ``p >= 4``; required when no
        compact support is declared.  The tail beyond the outermost panel is
        integrated on an inverted-radius panel, which is exact for pure
        power laws up to Gauss precision.
    feature_radii : sequence of float
        Distances from the origin at which the integrand has kinks or sharp
        features (profile transitions); they break both the radial panels
        and the polar panels of every sphere slice.
    """
    center = np.asarray(center, dtype=float)
    if not (np.isfinite(r_inner) and r_inner > 0.0):
        raise ValueError("r_inner must be positive and finite")
    dist = float(np.linalg.norm(center))
    if support is None and decay is None:
        raise ValueError("either compact support windows or a decay "
                         "envelope (C, p) must be declared")
    if decay is not None:
        c_dec, p_dec = float(decay[0]), float(decay[1])
        if p_dec < 4.0:
            raise ValueError("decay exponent must be >= 4 for an "
                             "integrable, panel-resolvable tail")

    feat = sorted(set(float(s) for s in feature_radii))

    if support is not None:
        windows = []
        for s0, s1 in support:
            lo = max(r_inner, s0 - dist)
            hi = s1 + dist
            if hi > lo:
                windows.append((lo, hi))
        windows = _merge_windows(windows)
        tail = None
        if decay is not None and windows:
            # compact support wins; no tail needed
            pass
    else:
        r_cut = max(r_inner * 8.0, (feat[-1] + dist) * 2.0 if feat else 0.0)
        windows = [(r_inner, r_cut)]
        tail = (r_cut, c_dec, p_dec)
    if support is not None:
        tail = None

    # break radial windows at radii where a sphere slice starts/stops meeting
    # a feature circle, then grade into at-most-one-octave panels
    breakpoints = set()
    for s in feat:
        for r in (s - dist, s + dist):
            breakpoints.add(r)
    panels = []
    for lo, hi in windows:
        edges = [lo]
        for b in sorted(breakpoints):
            if lo * (1.0 + 1e-12) < b < hi * (1.0 - 1e-12):
                edges.append(b)
        edges.append(hi)
        for a, b in zip(edges[:-1], edges[1:]):
            n_sub = max(1, int(math.ceil(math.log2(b / a) / max_panel_octaves)))
            sub = np.exp(np.linspace(math.log(a), math.log(b), n_sub + 1))
            for aa, bb in zip(sub[:-1], sub[1:]):
                panels.append((float(aa), float(bb)))

    x, w = roots_legendre(n_radial)
    rnodes, rweights = [], []
    for lo, hi in panels:
        # Gauss in log r:  dr = r d(log r)
        llo, lhi = math.log(lo), math.log(hi)
        half = 0.5 * (lhi - llo)
        mid = 0.5 * (lhi + llo)
        rr = np.exp(mid + half * x)
        rnodes.append(rr)
        rweights.append(half * w * rr)
    radial_nodes = np.concatenate(rnodes) if rnodes else np.zeros(0)
    radial_weights = np.concatenate(rweights) if rweights else np.zeros(0)

    return ExteriorRule(center=center, r_inner=float(r_inner),
                        panels=tuple(panels), radial_nodes=radial_nodes,
                        radial_weights=radial_weights, tail=tail,
                        n_polar=n_polar, n_azimuth=n_azimuth,
                        feature_radii=tuple(feat))


def _slice_rule(rule, r):
    dist = float(np.linalg.norm(rule.center))
    ladder_lo = abs(r - dist)
    ladder_hi = r + dist
    radii = set(rule.feature_radii)
    if dist > 0.0 and ladder_lo > 0.0:
        radii.update(octave_ladder(ladder_lo, ladder_hi))
    breaks = polar_breaks_for_radii(rule.center, r, sorted(radii))
    return build_sphere_rule(rule.center, r, n_polar=rule.n_polar,
                             n_azimuth=rule.n_azimuth, cos_breaks=breaks)


def integrate_exterior(f, rule):
    """Integrate a scalar field over the exterior region of ``rule``.

    The field is evaluated on concentric sphere slices; slices in declared
    support gaps are never visited.  Contributions are combined with
    ``math.fsum`` in a fixed order.

    Returns
    -------
    float
    """
    contributions = []
    for r, w in zip(rule.radial_nodes, rule.radial_weights):
        sl = _slice_rule(rule, float(r))
        contributions.append(w * integrate_sphere(f, sl))
    if rule.tail is not None:
        r_cut, c_dec, p_dec = rule.tail
        # invert the radius: r = 1/s maps [r_cut, inf) to (0, 1/r_cut];
        # dr = ds / s**2, and the sphere-slice integral of a field bounded by
        # C r**-p is O(r**(2-p)), so the mapped integrand is O(s**(p-4)),
        # smooth for p >= 4.
        x, w = roots_legendre(rule.n_polar)
        hi = 1.0 / r_cut
        s = 0.5 * hi * (x + 1.0)
        ws = 0.5 * hi * w
        for sv, wv in zip(s, ws):
            r = 1.0 / sv
            sl = _slice_rule(rule, r)
            contributions.append(wv * r * r * integrate_sphere(f, sl))
    return math.fsum(contributions)
