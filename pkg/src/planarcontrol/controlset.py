"""Half-turn fixed points, the periodic boundary orbit, and classification.

For nonzero trace, alternating the extreme controls for one half period each
defines an affine bounce map on the equilibrium line; its fixed points are the
two outermost points of a periodic orbit that bounds the (unique) control set
with nonempty interior.  Zero trace makes the whole plane controllable.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import TraceZero
from .planar import line_coordinate
from .system import LinearControlSystem, flow_many

__all__ = [
    "BoundaryOrbit",
    "Classification",
    "ControlSetInfo",
    "SweepPoint",
    "TRACE_ZERO_BAND",
    "classify",
    "control_sets",
    "half_turn_fixed_points",
    "half_turn_iterates",
    "is_trace_zero",
    "periodic_orbit",
    "sweep_control_ranges",
]

# |tr A| <= TRACE_ZERO_BAND * ||A||_F counts as zero trace: the orbit data
# blows up like 1/(1 - e^{pi*tr/(2*eig_imag)}) there, so a hard band beats
# any interpolation.
TRACE_ZERO_BAND = 1e-10


def is_trace_zero(sys: LinearControlSystem) -> bool:
    scale = math.sqrt(float(np.sum(sys.a * sys.a)))
    return abs(sys.trace) <= TRACE_ZERO_BAND * scale


class Classification(Enum):
    """Shape of the control set(s), decided by the sign of the trace."""

    CONTROLLABLE_TRACE_ZERO = "controllable"
    CLOSED_CONTROL_SET = "closed"
    OPEN_CONTROL_SET_WITH_BOUNDARY_ORBIT = "open"


def classify(sys: LinearControlSystem) -> Classification:
    """Classify the system by trace sign (complex spectrum is guaranteed)."""
    if is_trace_zero(sys):
        return Classification.CONTROLLABLE_TRACE_ZERO
    if sys.trace < 0.0:
        return Classification.CLOSED_CONTROL_SET
    return Classification.OPEN_CONTROL_SET_WITH_BOUNDARY_ORBIT


def _contraction(sys: LinearControlSystem) -> float:
    """Half-turn radial factor e^{pi * eig_real / eig_imag}."""
    cf = sys.canonical
    return math.exp(math.pi * cf.eig_real / cf.eig_imag)


def half_turn_fixed_points(sys: LinearControlSystem) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form fixed points (p_plus, p_minus) of the composed half-turn maps.

    With q = e^{pi*eig_real/eig_imag},

        p_plus  = ((-u_max + q u_min) / (1 - q)) A^-1 eta
        p_minus = ((-u_min + q u_max) / (1 - q)) A^-1 eta

    and one half turn under u_min maps p_plus to p_minus and vice versa under
    u_max, for either sign of the trace.

    Raises
    ------
    TraceZero
        Inside the zero-trace band, where the formulas degenerate.
    """
    if is_trace_zero(sys):
        raise TraceZero("half-turn fixed points need a nonzero trace")
    q = _contraction(sys)
    p_plus = ((-sys.u_max + q * sys.u_min) / (1.0 - q)) * sys.inv_a_eta
    p_minus = ((-sys.u_min + q * sys.u_max) / (1.0 - q)) * sys.inv_a_eta
    return p_plus, p_minus


def half_turn_iterates(sys: LinearControlSystem, n: int) -> list[np.ndarray]:
    """Iterates P_0 .. P_n of the alternating half-turn recurrence.

    P_0 is the u_max equilibrium; each step applies one half turn under u_min
    (odd index) or u_max (even index).  With q = e^{pi*eig_real/eig_imag} and
    S_m = sum_{j<=m} q^j, the values admit the closed forms

        P_{2k}   = -q S_{2k-1} v(u_min) + S_{2k} v(u_max)
        P_{2k+1} =    S_{2k+1} v(u_min) - q S_{2k} v(u_max)

    which are used directly: the geometric sums accumulate without
    cancellation, so the error stays at one rounding of the limit uniformly
    in k instead of compounding per half turn.

    For a positive trace the recurrence diverges, so it is run on the
    time-reversed system, whose iterates converge to the same orbit corners
    with roles exchanged.

    Raises
    ------
    TraceZero
        Inside the zero-trace band.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if is_trace_zero(sys):
        raise TraceZero("half-turn iterates need a nonzero trace")
    if sys.trace > 0.0:
        sys = sys.time_reversed()
    q = _contraction(sys)
    v_min = -sys.u_min * sys.inv_a_eta
    v_max = -sys.u_max * sys.inv_a_eta
    powers = np.cumsum(q ** np.arange(n + 2))  # powers[m] = S_m
    out = []
    for k in range(n + 1):
        if k == 0:
            out.append(v_max.copy())
        elif k % 2 == 0:
            out.append(-q * powers[k - 1] * v_min + powers[k] * v_max)
        else:
            out.append(powers[k] * v_min - q * powers[k - 1] * v_max)
    return out


@dataclass(frozen=True)
class BoundaryOrbit:
    """Sampled periodic orbit through the half-turn fixed points.

    ``arc_minus`` runs from p_plus under u_min for one half period,
    ``arc_plus`` returns from p_minus under u_max; each is a polyline of
    ``samples_per_arc + 1`` points.
    """

    p_plus: np.ndarray
    p_minus: np.ndarray
    half_period: float
    arc_minus: np.ndarray
    arc_plus: np.ndarray

    def polyline(self) -> np.ndarray:
        """Closed boundary polyline (first point repeated at the end)."""
        return np.vstack([self.arc_minus, self.arc_plus[1:]])

    def bounding_box(self) -> tuple[float, float, float, float]:
        pts = self.polyline()
        return (
            float(pts[:, 0].min()),
            float(pts[:, 0].max()),
            float(pts[:, 1].min()),
            float(pts[:, 1].max()),
        )


def periodic_orbit(sys: LinearControlSystem, samples_per_arc: int = 256) -> BoundaryOrbit:
    """Sample the periodic orbit formed by the two extreme-control half turns.

    Raises
    ------
    TraceZero
        Inside the zero-trace band (every constant-control solution is already
        periodic there; there is no distinguished orbit).
    """
    if samples_per_arc < 16:
        raise ValueError("samples_per_arc must be at least 16")
    p_plus, p_minus = half_turn_fixed_points(sys)
    half = sys.half_period
    s = np.linspace(0.0, half, samples_per_arc + 1)
    arc_minus = flow_many(sys, s, p_plus, sys.u_min)
    arc_plus = flow_many(sys, s, p_minus, sys.u_max)
    return BoundaryOrbit(p_plus, p_minus, half, arc_minus, arc_plus)


@dataclass(frozen=True)
class ControlSetInfo:
    """Descriptor of one control set.

    ``kind`` is one of "whole_plane", "closed_region", "open_region",
    "periodic_orbit".  ``region`` (when present) is the enclosed region object
    from :mod:`planarcontrol.geometry`; ``boundary`` is its closed polyline.
    """

    kind: str
    closed: bool
    region: object | None = None
    boundary: np.ndarray | None = None


def control_sets(sys: LinearControlSystem) -> list[ControlSetInfo]:
    """All control sets with their descriptors, in the documented order.

    Zero trace: the whole plane.  Negative trace: the closed enclosed region.
    Positive trace: the open interior and the boundary orbit, in that order.
    """
    from .geometry import build_orbit_region  # deferred: geometry imports us

    kind = classify(sys)
    if kind is Classification.CONTROLLABLE_TRACE_ZERO:
        return [ControlSetInfo(kind="whole_plane", closed=True)]
    region = build_orbit_region(sys)
    boundary = region.boundary
    if kind is Classification.CLOSED_CONTROL_SET:
        return [
            ControlSetInfo(
                kind="closed_region", closed=True, region=region, boundary=boundary
            )
        ]
    return [
        ControlSetInfo(
            kind="open_region", closed=False, region=region, boundary=boundary
        ),
        ControlSetInfo(kind="periodic_orbit", closed=True, boundary=boundary),
    ]


@dataclass(frozen=True)
class SweepPoint:
    """Orbit data for one control range [alpha, rho] of the sweep family."""

    alpha: float
    rho: float
    p_plus: np.ndarray
    p_minus: np.ndarray
    boundary: np.ndarray
    p_plus_coordinate: float
    hausdorff_prev: float


def sweep_control_ranges(
    a,
    eta,
    pivot: float,
    grid,
    samples_per_arc: int = 256,
) -> list[SweepPoint]:
    """Evaluate the orbit family over control ranges [alpha, rho] around a pivot.

    Every (alpha, rho) must straddle the pivot.  Each point carries the
    half-turn fixed points, the sampled boundary, the signed line coordinate
    of p_plus along -A^-1 eta (which grows without bound as the range grows),
    and the Hausdorff distance to the previous grid point's boundary (NaN for
    the first).

    Requires a negative trace; errors from system construction propagate.
    """
    points: list[SweepPoint] = []
    prev_boundary = None
    for alpha, rho in grid:
        alpha = float(alpha)
        rho = float(rho)
        if not alpha < pivot < rho:
            raise ValueError(
                f"sweep range [{alpha}, {rho}] must straddle pivot {pivot}"
            )
        sys = LinearControlSystem(a, eta, alpha, rho)
        if sys.trace >= 0.0 or is_trace_zero(sys):
            raise TraceZero("sweep family requires a negative trace")
        orbit = periodic_orbit(sys, samples_per_arc)
        boundary = orbit.polyline()
        coord = line_coordinate(orbit.p_plus, -sys.inv_a_eta)
        if prev_boundary is None:
            dist = float("nan")
        else:
            from .oracle import hausdorff  # deferred: oracle imports geometry

            dist = hausdorff(boundary, prev_boundary)
        points.append(
            SweepPoint(
                alpha=alpha,
                rho=rho,
                p_plus=orbit.p_plus,
                p_minus=orbit.p_minus,
                boundary=boundary,
                p_plus_coordinate=coord,
                hausdorff_prev=dist,
            )
        )
        prev_boundary = boundary
    return points
