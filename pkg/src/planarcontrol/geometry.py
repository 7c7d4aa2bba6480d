"""Spiral-bounded regions, membership tests, and the invariance margin function.

A spiral region is bounded by the chord through two points and the half-turn
spiral arc joining them.  In the canonical frame the arc is a genuine
logarithmic spiral, the region is convex, and it is exactly the set of points
lying on the inner side of the chord and of every arc tangent.  Membership is
therefore evaluated as a minimum of inner products over a tau grid of tangent
constraints, always in the canonical frame (which also makes the test exact
for clockwise systems and skewed bases).

The region enclosed by the periodic boundary orbit is the union of two such
half regions sharing their chord.  The union is convex (the arcs meet with
parallel tangents at the fixed points), so membership drops the chord
constraints and intersects the two arcs' tangent families; points on the open
chord correctly come out interior.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import (
    DegenerateSpiral,
    OutOfDomain,
    PreconditionViolated,
    TraceZero,
    ZeroVector,
)
from .planar import CanonicalForm, as_vector, line_coordinate
from .system import LinearControlSystem, equilibrium
from .controlset import BoundaryOrbit, is_trace_zero, periodic_orbit

__all__ = [
    "InvarianceReport",
    "Membership",
    "MembershipVerdict",
    "OrbitRegion",
    "SpiralRegion",
    "angle_between",
    "build_orbit_region",
    "check_region_invariance",
    "polyline_distance",
    "region_contains",
    "tangent_margin",
    "tangent_margin_grid",
]


class Membership(Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    EXTERIOR = "exterior"


@dataclass(frozen=True)
class MembershipVerdict:
    """Classification of a query point with its signed constraint margin.

    The margin is the minimum over the active constraint family of the signed
    distance (in the canonical frame) to each constraint line; boundary means
    |margin| is within the tolerance band.
    """

    verdict: Membership
    margin: float

    @property
    def is_exterior(self) -> bool:
        return self.verdict is Membership.EXTERIOR


def _verdict(margin: float, tol: float) -> MembershipVerdict:
    if margin > tol:
        return MembershipVerdict(Membership.INTERIOR, margin)
    if margin < -tol:
        return MembershipVerdict(Membership.EXTERIOR, margin)
    return MembershipVerdict(Membership.BOUNDARY, margin)


def angle_between(a, b) -> float:
    """Angle in [0, pi] between two nonzero vectors.

    Raises
    ------
    ZeroVector
        If either argument has zero norm.
    """
    a = as_vector(a)
    b = as_vector(b)
    na = math.hypot(a[0], a[1])
    nb = math.hypot(b[0], b[1])
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("angle requires nonzero vectors")
    c = float(a @ b) / (na * nb)
    return math.acos(min(1.0, max(-1.0, c)))


def _spiral_points(cf: CanonicalForm, delta: np.ndarray, taus: np.ndarray):
    """Canonical-frame arc points exp(tau*Ac) @ delta for an array of taus."""
    r, w = cf.eig_real, cf.eig_imag
    jdelta = np.array([-delta[1], delta[0]])
    g = np.exp(r * taus)
    return np.outer(g * np.cos(w * taus), delta) + np.outer(
        g * np.sin(w * taus), jdelta
    )


def _spiral_tangents(cf: CanonicalForm, arc: np.ndarray) -> np.ndarray:
    """Tangent vectors Ac @ p for canonical-frame arc points p (n, 2)."""
    r, w = cf.eig_real, cf.eig_imag
    jarc = np.stack([-arc[:, 1], arc[:, 0]], axis=1)
    return r * arc + w * jarc


@dataclass(frozen=True)
class SpiralRegion:
    """Region bounded by the chord [v1, v2] and the half-turn arc from v1.

    Constraint data is precomputed on a tau grid in the canonical frame of the
    region's matrix; ``tau_grid`` must be at least 16 (default 512).
    """

    v1: np.ndarray
    v2: np.ndarray
    canonical: CanonicalForm
    tau_grid: int = 512
    _chord_base: np.ndarray = field(init=False, repr=False)
    _chord_normal: np.ndarray = field(init=False, repr=False)
    _arc_base: np.ndarray = field(init=False, repr=False)
    _arc_normal: np.ndarray = field(init=False, repr=False)
    scale: float = field(init=False, repr=False)

    def __post_init__(self):
        if self.tau_grid < 16:
            raise ValueError("tau_grid must be at least 16")
        v1 = as_vector(self.v1)
        v2 = as_vector(self.v2)
        object.__setattr__(self, "v1", v1)
        object.__setattr__(self, "v2", v2)
        cf = self.canonical
        z1 = cf.to_canonical(v1)
        z2 = cf.to_canonical(v2)
        delta = z1 - z2
        norm = math.hypot(delta[0], delta[1])
        if norm == 0.0:
            raise DegenerateSpiral("region endpoints coincide")
        taus = np.linspace(0.0, math.pi / cf.eig_imag, self.tau_grid)
        arc = _spiral_points(cf, delta, taus)
        tangents = _spiral_tangents(cf, arc)
        normals = np.stack([-tangents[:, 1], tangents[:, 0]], axis=1)
        normals /= np.linalg.norm(normals, axis=1, keepdims=True)
        chord_normal = np.array([-delta[1], delta[0]]) / norm
        object.__setattr__(self, "_chord_base", z2)
        object.__setattr__(self, "_chord_normal", chord_normal)
        object.__setattr__(self, "_arc_base", arc + z2)
        object.__setattr__(self, "_arc_normal", normals)
        object.__setattr__(self, "scale", norm)

    def _canonical_points(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return self.canonical.to_canonical(pts)

    def arc_margins(self, points) -> np.ndarray:
        """Minimum tangent-constraint margin per query point (n,)."""
        x = self._canonical_points(points)
        vals = x @ self._arc_normal.T - np.sum(
            self._arc_base * self._arc_normal, axis=1
        )
        return vals.min(axis=1)

    def chord_margins(self, points) -> np.ndarray:
        x = self._canonical_points(points)
        return (x - self._chord_base) @ self._chord_normal

    def margins(self, points) -> np.ndarray:
        """Full region margin (chord and arc constraints) per point (n,)."""
        return np.minimum(self.arc_margins(points), self.chord_margins(points))


def region_contains(region: SpiralRegion, v, tol: float | None = None) -> MembershipVerdict:
    """Membership of a point in a spiral region, with signed margin."""
    if tol is None:
        tol = 1e-6 * region.scale
    margin = float(region.margins(as_vector(v))[0])
    return _verdict(margin, tol)


def tangent_margin(cf: CanonicalForm, s: float, tau: float, w1, w2, v1) -> float:
    """Signed offset of the moving spiral point against one arc tangent.

    All point arguments are canonical-frame vectors with the region base point
    at the origin: the region is spanned by ``v1`` and 0, ``w2`` lies on the
    segment (0, v1), and ``w1`` starts the moving spiral.  The value is

        < exp(s Ac)(w1 - w2) + w2 - exp(tau Ac) v1 ,  perp(Ac exp(tau Ac) v1) >

    which is nonnegative on its whole parameter domain when eig_real < 0;
    that nonnegativity is what the invariance check exercises.

    The domain is ``0 <= s <= (pi - sigma)/eig_imag`` and
    ``0 <= tau <= pi/eig_imag``, where sigma is the angle between v1 and
    w1 - w2.

    Raises
    ------
    OutOfDomain
        If (s, tau) falls outside the domain rectangle.
    PreconditionViolated
        If w2 is not on the segment (0, v1) or w1 - w2 vanishes.
    """
    g = tangent_margin_grid(cf, w1, w2, v1, s_values=[s], tau_values=[tau])
    return float(g[0, 0])


def _check_margin_config(cf: CanonicalForm, w1, w2, v1) -> float:
    """Validate the (w1, w2, v1) configuration; return sigma."""
    v1 = as_vector(v1)
    w1 = as_vector(w1)
    w2 = as_vector(w2)
    nv1 = math.hypot(v1[0], v1[1])
    if nv1 == 0.0:
        raise PreconditionViolated("v1 must be nonzero")
    diff = w1 - w2
    if math.hypot(diff[0], diff[1]) <= 1e-12 * nv1:
        raise PreconditionViolated("w1 - w2 is numerically zero")
    coord = float(w2 @ v1) / (nv1 * nv1)
    off = w2 - coord * v1
    if math.hypot(off[0], off[1]) > 1e-9 * (1.0 + nv1):
        raise PreconditionViolated("w2 must lie on the segment (0, v1)")
    if not -1e-9 <= coord <= 1.0 + 1e-9:
        raise PreconditionViolated("w2 must lie between 0 and v1")
    return angle_between(v1, diff)


def tangent_margin_grid(
    cf: CanonicalForm,
    w1,
    w2,
    v1,
    s_values=None,
    tau_values=None,
    s_count: int = 64,
    tau_count: int = 64,
) -> np.ndarray:
    """Tangent margins on a grid of (s, tau); rows index s, columns tau.

    With ``s_values``/``tau_values`` omitted, uses uniform grids over the full
    domain rectangle; explicit values are validated against it.
    """
    v1 = as_vector(v1)
    w1 = as_vector(w1)
    w2 = as_vector(w2)
    sigma = _check_margin_config(cf, w1, w2, v1)
    s_max = (math.pi - sigma) / cf.eig_imag
    tau_max = math.pi / cf.eig_imag
    if s_values is None:
        s_values = np.linspace(0.0, s_max, s_count)
    else:
        s_values = np.asarray(s_values, dtype=float)
        slack = 1e-9 * (1.0 + tau_max)
        if np.any(s_values < -slack) or np.any(s_values > s_max + slack):
            raise OutOfDomain(
                f"s must lie in [0, {s_max:.6g}] (sigma = {sigma:.6g})"
            )
    if tau_values is None:
        tau_values = np.linspace(0.0, tau_max, tau_count)
    else:
        tau_values = np.asarray(tau_values, dtype=float)
        slack = 1e-9 * (1.0 + tau_max)
        if np.any(tau_values < -slack) or np.any(tau_values > tau_max + slack):
            raise OutOfDomain(f"tau must lie in [0, {tau_max:.6g}]")
    moving = _spiral_points(cf, w1 - w2, s_values) + w2  # (ns, 2)
    ref = _spiral_points(cf, v1, tau_values)  # (nt, 2)
    tangents = _spiral_tangents(cf, ref)
    normals = np.stack([-tangents[:, 1], tangents[:, 0]], axis=1)  # (nt, 2)
    return moving @ normals.T - np.sum(ref * normals, axis=1)


@dataclass(frozen=True)
class InvarianceReport:
    """Worst membership margin of a moving spiral sampled over its time span."""

    worst_margin: float
    worst_s: float
    sigma: float
    samples: int


def check_region_invariance(
    region: SpiralRegion, w1, w2, s_samples: int = 128
) -> InvarianceReport:
    """Check that a spiral started inside the region stays inside it.

    The spiral around ``w2`` (on the chord) through ``w1`` (in the region) is
    sampled at ``s_samples`` times spanning ``[0, (pi - sigma)/eig_imag]``,
    where sigma is the canonical-frame angle between the chord direction and
    ``w1 - w2``; the report carries the worst membership margin over the
    samples.

    Raises
    ------
    PreconditionViolated
        If eig_real >= 0, w2 is off the chord segment, w1 - w2 is numerically
        zero, or w1 lies outside the region.
    """
    cf = region.canonical
    if cf.eig_real >= 0.0:
        raise PreconditionViolated("invariance requires eig_real < 0")
    w1 = as_vector(w1)
    w2 = as_vector(w2)
    z1 = cf.to_canonical(region.v1)
    z2 = cf.to_canonical(region.v2)
    zw1 = cf.to_canonical(w1)
    zw2 = cf.to_canonical(w2)
    chord = z1 - z2
    rel = zw2 - z2
    coord = float(rel @ chord) / float(chord @ chord)
    off = rel - coord * chord
    if math.hypot(off[0], off[1]) > 1e-9 * (1.0 + region.scale):
        raise PreconditionViolated("w2 must lie on the chord segment")
    if not -1e-9 <= coord <= 1.0 + 1e-9:
        raise PreconditionViolated("w2 must lie between v1 and v2")
    diff = zw1 - zw2
    if math.hypot(diff[0], diff[1]) < 1e-12 * region.scale:
        raise PreconditionViolated("w1 - w2 is numerically zero")
    start = float(region.margins(w1)[0])
    if start < -1e-6 * region.scale:
        raise PreconditionViolated("w1 must lie in the region")
    sigma = angle_between(chord, diff)
    s = np.linspace(0.0, (math.pi - sigma) / cf.eig_imag, s_samples)
    pts_c = _spiral_points(cf, diff, s) + zw2
    pts = cf.from_canonical(pts_c)
    margins = region.margins(pts)
    worst = int(np.argmin(margins))
    return InvarianceReport(
        worst_margin=float(margins[worst]),
        worst_s=float(s[worst]),
        sigma=sigma,
        samples=s_samples,
    )


@dataclass(frozen=True)
class OrbitRegion:
    """Closed region enclosed by the periodic boundary orbit.

    For a positive trace everything is built on the time-reversed system
    (same orbit as a set, arcs traversed the other way); ``work_system`` is
    the system actually used and always has a negative trace.  ``p_plus`` and
    ``p_minus`` are ordered so that on the line through the equilibria,
    in the signed coordinate along -A^-1 eta,
    p_minus < v(u_min) < v(u_max) < p_plus.
    """

    system: LinearControlSystem
    work_system: LinearControlSystem
    orbit: BoundaryOrbit
    half_plus: SpiralRegion
    half_minus: SpiralRegion
    boundary: np.ndarray
    time_reversed: bool
    scale: float

    @property
    def p_plus(self) -> np.ndarray:
        return self.orbit.p_plus

    @property
    def p_minus(self) -> np.ndarray:
        return self.orbit.p_minus

    def margins_many(self, points) -> np.ndarray:
        """Support margin per point: min over both arcs' tangent families."""
        return np.minimum(
            self.half_plus.arc_margins(points), self.half_minus.arc_margins(points)
        )

    def margin(self, v) -> float:
        return float(self.margins_many(as_vector(v))[0])

    def contains(self, v, tol: float | None = None) -> MembershipVerdict:
        """Membership in the closed enclosed region, with signed margin."""
        if tol is None:
            tol = 1e-6 * self.scale
        return _verdict(self.margin(v), tol)

    def exterior_distance(self, v) -> float:
        """Euclidean distance to the region: 0 unless the point is exterior.

        Exterior distances are measured to the sampled boundary polyline and
        converge to the true distance as the sampling grows.
        """
        if self.contains(v).is_exterior:
            return float(polyline_distance(as_vector(v), self.boundary)[0])
        return 0.0


def build_orbit_region(
    sys: LinearControlSystem,
    samples_per_arc: int = 1024,
    tau_grid: int = 512,
) -> OrbitRegion:
    """Construct the enclosed region of the periodic orbit of ``sys``.

    Raises
    ------
    TraceZero
        Inside the zero-trace band (no bounded enclosed region exists).
    """
    if is_trace_zero(sys):
        raise TraceZero("the enclosed region needs a nonzero trace")
    reversed_ = sys.trace > 0.0
    work = sys.time_reversed() if reversed_ else sys
    orbit = periodic_orbit(work, samples_per_arc)
    v_min = equilibrium(work, work.u_min)
    v_max = equilibrium(work, work.u_max)
    half_plus = SpiralRegion(orbit.p_plus, v_min, work.canonical, tau_grid)
    half_minus = SpiralRegion(orbit.p_minus, v_max, work.canonical, tau_grid)
    zp = work.canonical.to_canonical(orbit.p_plus)
    zm = work.canonical.to_canonical(orbit.p_minus)
    scale = math.hypot(zp[0] - zm[0], zp[1] - zm[1])
    return OrbitRegion(
        system=sys,
        work_system=work,
        orbit=orbit,
        half_plus=half_plus,
        half_minus=half_minus,
        boundary=orbit.polyline(),
        time_reversed=reversed_,
        scale=scale,
    )


def line_order_coordinates(region: OrbitRegion) -> dict[str, float]:
    """Signed coordinates along -A^-1 eta of the four line points.

    In this coordinate p_minus < v(u_min) < v(u_max) < p_plus.
    """
    work = region.work_system
    direction = -work.inv_a_eta
    return {
        "p_minus": line_coordinate(region.p_minus, direction),
        "v_u_min": line_coordinate(equilibrium(work, work.u_min), direction),
        "v_u_max": line_coordinate(equilibrium(work, work.u_max), direction),
        "p_plus": line_coordinate(region.p_plus, direction),
    }


def polyline_distance(points, polyline: np.ndarray) -> np.ndarray:
    """Euclidean distance from each query point to a polyline (segments).

    ``points`` is (2,) or (n, 2); ``polyline`` is (m, 2) with m >= 2.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    poly = np.asarray(polyline, dtype=float)
    a = poly[:-1]
    d = poly[1:] - a
    len2 = np.maximum(np.sum(d * d, axis=1), 1e-300)
    out = np.empty(len(pts))
    chunk = 1024
    for lo in range(0, len(pts), chunk):
        x = pts[lo : lo + chunk]  # (c, 2)
        t = ((x[:, None, :] - a[None, :, :]) * d[None, :, :]).sum(axis=2) / len2
        t = np.clip(t, 0.0, 1.0)
        proj = a[None, :, :] + t[:, :, None] * d[None, :, :]
        diff = x[:, None, :] - proj
        dist2 = np.sum(diff * diff, axis=2)
        out[lo : lo + chunk] = np.sqrt(dist2.min(axis=1))
    return out
