"""Constructive trajectory synthesis for the controllability results.

Zero trace: every constant-control solution is a circle in the canonical
frame, all circle centers (the equilibria) sit on one line through the origin,
and any circle centered on a line meets it in two diametrically opposite
points.  Hopping between half circles therefore walks a point along the line
by a fixed stride per hop until one final arc can finish on the goal
equilibrium exactly.

Negative trace: the region enclosed by the periodic orbit is reached from the
u_min equilibrium by alternating extreme half turns whose iterates converge
geometrically to the orbit corners; splicing in the backward exit arc of the
target yields an endpoint within any requested epsilon.

All constructions run in the canonical frame and emit exact-arc schedules, so
every result is re-verified by simulation at machine precision.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    EpsilonTooSmall,
    InvalidControl,
    NoIntersectionFound,
    PreconditionViolated,
    TargetNotInterior,
    TraceNotZero,
    TraceZero,
)
from .geometry import Membership, OrbitRegion, build_orbit_region
from .planar import as_vector
from .system import LinearControlSystem, equilibrium, simulate
from .controlset import is_trace_zero

__all__ = [
    "PlanResult",
    "hop_plan",
    "loop_plan",
    "reach_plan",
    "spiral_crossing",
]


@dataclass(frozen=True)
class PlanResult:
    """A schedule with its simulated endpoint and certification data.

    ``endpoint`` is the exact simulation of ``schedule`` from ``start``;
    ``endpoint_error`` is its Euclidean distance to ``goal``.  ``hops`` counts
    schedule segments.  ``time_reversed`` marks plans computed on the
    time-reversed system (positive-trace reach planning).
    """

    schedule: tuple
    start: np.ndarray
    goal: np.ndarray
    endpoint: np.ndarray
    endpoint_error: float
    hops: int
    time_reversed: bool = False


def _certified(sys, start, goal, schedule, time_reversed=False) -> PlanResult:
    traj = simulate(sys, start, schedule)
    endpoint = traj.endpoint
    return PlanResult(
        schedule=tuple(schedule),
        start=as_vector(start),
        goal=as_vector(goal),
        endpoint=endpoint,
        endpoint_error=float(np.linalg.norm(endpoint - goal)),
        hops=len(schedule),
        time_reversed=time_reversed,
    )


def _ccw_angle(a, b) -> float:
    """Counter-clockwise angle in [0, 2*pi) rotating vector a onto vector b."""
    ang = math.atan2(a[0] * b[1] - a[1] * b[0], a[0] * b[0] + a[1] * b[1])
    return ang if ang >= 0.0 else ang + 2.0 * math.pi


class _LineFrame:
    """Canonical-frame coordinates along the equilibrium line."""

    def __init__(self, sys: LinearControlSystem):
        cf = sys.canonical
        self.cf = cf
        e_min = cf.to_canonical(-sys.u_min * sys.inv_a_eta)
        e_max = cf.to_canonical(-sys.u_max * sys.inv_a_eta)
        span = e_max - e_min
        self.per_u = span / (sys.u_max - sys.u_min)
        self.k = float(np.linalg.norm(self.per_u))
        self.unit = self.per_u / self.k
        self.normal = np.array([-self.unit[1], self.unit[0]])
        self.t_min = float(e_min @ self.unit)
        self.t_max = float(e_max @ self.unit)

    def coord(self, point_c) -> float:
        return float(point_c @ self.unit)

    def offset(self, point_c) -> float:
        return float(point_c @ self.normal)

    def on_line(self, t: float) -> np.ndarray:
        return t * self.unit

    def t_of_control(self, u: float, sys: LinearControlSystem) -> float:
        return self.t_min + (u - sys.u_min) * self.k

    def control_of_t(self, t: float, sys: LinearControlSystem) -> float:
        return sys.u_min + (t - self.t_min) / self.k


def hop_plan(sys: LinearControlSystem, start, u_goal: float, tol: float = 1e-9) -> PlanResult:
    """Drive a zero-trace system from ``start`` onto the equilibrium of ``u_goal``.

    The plan hops along half circles between the extreme-control equilibria:
    an optional first arc brings an off-line start onto the equilibrium line,
    half-turn reflections then march the point by one control-range stride per
    hop, and a single solved-control arc finishes exactly on the goal.  The
    final arc is taken as soon as the line point enters the feasibility window
    where the solved control lies in the admissible range.

    Raises
    ------
    TraceNotZero
        If the trace is outside the zero band.
    InvalidControl
        If ``u_goal`` is outside the control range.
    """
    if not is_trace_zero(sys):
        raise TraceNotZero("hop planning applies to zero-trace systems")
    if not sys.control_in_range(u_goal):
        raise InvalidControl(f"goal control {u_goal} outside range")
    start = as_vector(start)
    cf = sys.canonical
    frame = _LineFrame(sys)
    ei = cf.eig_imag
    half = math.pi / ei
    goal_point = equilibrium(sys, u_goal)
    x0 = cf.to_canonical(start)
    t_goal = frame.t_of_control(u_goal, sys)
    stride = frame.t_max - frame.t_min
    scale = max(1.0, abs(frame.coord(x0)), abs(frame.t_min), abs(frame.t_max))
    line_tol = tol * scale

    if np.linalg.norm(x0 - cf.to_canonical(goal_point)) <= 1e-12 * scale:
        return _certified(sys, start, goal_point, ())

    window = (2.0 * frame.t_min - t_goal, 2.0 * frame.t_max - t_goal)

    def march_count(t_land: float) -> int:
        count = 0
        cap = int(math.ceil((abs(t_land - t_goal) + stride) / stride)) + 4
        t = t_land
        while not window[0] - line_tol <= t <= window[1] + line_tol:
            t = 2.0 * (frame.t_max if t > window[1] else frame.t_min) - t
            count += 1
            if count > cap:  # pragma: no cover - march provably terminates
                raise RuntimeError("hop march count failed to terminate")
        return count

    schedule = []
    if abs(frame.offset(x0)) > line_tol:
        # Off-line start: pick the landing among both circles and both line
        # sides needing the fewest reflections before the window (exact
        # count; the far-side u_min landing alone already meets the
        # documented hop bound, so the minimum does too).
        best = None
        for u_c, side in (
            (sys.u_max, -1.0),
            (sys.u_min, 1.0),
            (sys.u_max, 1.0),
            (sys.u_min, -1.0),
        ):
            center_t = frame.t_of_control(u_c, sys)
            center = frame.on_line(center_t)
            radius = float(np.linalg.norm(x0 - center))
            t_land = center_t + side * radius
            marches = march_count(t_land)
            if best is None or marches < best[0]:
                best = (marches, u_c, center, t_land)
        _, u_c, center, t_land = best
        ang = _ccw_angle(x0 - center, frame.on_line(t_land) - center)
        if ang <= 0.0:
            ang = 2.0 * math.pi
        schedule.append((u_c, ang / ei))
        t = t_land
    else:
        t = frame.coord(x0)

    guard = int(math.ceil((abs(t - t_goal) + stride) / stride)) + 4
    while not window[0] - line_tol <= t <= window[1] + line_tol:
        if t > window[1]:
            u_c, center_t = sys.u_max, frame.t_max
        else:
            u_c, center_t = sys.u_min, frame.t_min
        t = 2.0 * center_t - t
        schedule.append((u_c, half))
        guard -= 1
        if guard < 0:  # pragma: no cover - march provably terminates
            raise RuntimeError("hop march failed to terminate")

    if abs(t - t_goal) > 1e-12 * scale:
        mid = 0.5 * (t + t_goal)
        u_n = frame.control_of_t(mid, sys)
        u_n = min(max(u_n, sys.u_min), sys.u_max)
        schedule.append((u_n, half))
    return _certified(sys, start, goal_point, schedule)


def loop_plan(sys: LinearControlSystem, start, u_goal: float, tol: float = 1e-9) -> PlanResult:
    """Return path from the goal equilibrium back to ``start`` (zero trace).

    Each circle of the hop plan is traversed along its complementary arc, in
    reverse order and in forward time; concatenating the hop plan with this
    one closes a periodic trajectory through both points.
    """
    hop = hop_plan(sys, start, u_goal, tol)
    full = 2.0 * math.pi / sys.canonical.eig_imag
    schedule = tuple((u, full - dt) for u, dt in reversed(hop.schedule))
    return _certified(sys, hop.goal, as_vector(start), schedule)


def _wrap_pm_pi(a: float) -> float:
    return (a + math.pi) % (2.0 * math.pi) - math.pi


def _crossing_search(
    sys: LinearControlSystem,
    x_of,
    s_max: float,
    center: np.ndarray,
    y_base: np.ndarray,
    zeta: float,
    t_max: float,
    grid_per_half: int = 128,
    margin_stop=None,
):
    """Find (s, t) where the x-curve meets a spiral y-curve, via polar branches.

    ``x_of`` maps s to a canonical-frame point.  The y-curve is the spiral
    around ``center`` (canonical frame) through ``y_base`` with time direction
    ``zeta``: its radius at time t is r0 * exp(zeta * eig_real * t) and its
    polar angle is ang0 + zeta * eig_imag * t.  Matching angles with the
    x-curve's unwrapped polar angle phi(s) gives, per winding number j, a
    continuous time branch t_j(s) and a radial residual whose sign changes
    are bisected in s.  Returns (s, t, residual) of the first crossing in
    scan order, or None.
    """
    cf = sys.canonical
    ei, er = cf.eig_imag, cf.eig_real
    rel = y_base - center
    r0 = float(np.linalg.norm(rel))
    ang0 = math.atan2(rel[1], rel[0])
    two_pi = 2.0 * math.pi

    def raw_angle(s):
        d = x_of(s) - center
        return math.atan2(d[1], d[0])

    def radius(s):
        d = x_of(s) - center
        return math.hypot(d[0], d[1])

    def t_of(phi, j):
        # ang0 + zeta*ei*t = phi - 2*pi*j  =>  t = zeta*(phi - 2*pi*j - ang0)/ei
        return zeta * (phi - two_pi * j - ang0) / ei

    def rho(s, phi, j):
        return radius(s) - r0 * math.exp(zeta * er * t_of(phi, j))

    def y_of(t):
        # Canonical-frame point of the y-curve at time t.
        g = math.exp(zeta * t * er)
        ang = zeta * t * ei
        c, sn = math.cos(ang), math.sin(ang)
        return center + np.array(
            [g * (c * rel[0] - sn * rel[1]), g * (sn * rel[0] + c * rel[1])]
        )

    half = math.pi / ei
    n = max(2, int(math.ceil(s_max / half * grid_per_half)))
    s_grid = np.linspace(0.0, s_max, n + 1)
    slack = 1e-9 * (1.0 + t_max)

    phi_prev = raw_angle(s_grid[0])
    for i in range(1, len(s_grid)):
        s_lo, s_hi = float(s_grid[i - 1]), float(s_grid[i])
        phi_lo = phi_prev
        phi_hi = phi_lo + _wrap_pm_pi(raw_angle(s_hi) - phi_lo)
        phi_prev = phi_hi
        # Winding numbers whose time branch intersects [0, t_max] somewhere
        # in this s interval: every integer between the endpoint floors.
        floors = [
            math.floor((phi - ang0 - zeta * ei * t_end) / two_pi)
            for phi in (phi_lo, phi_hi)
            for t_end in (0.0, t_max)
        ]
        for j in range(min(floors), max(floors) + 2):
            t_lo, t_hi_ = t_of(phi_lo, j), t_of(phi_hi, j)
            if not (
                -slack <= t_lo <= t_max + slack and -slack <= t_hi_ <= t_max + slack
            ):
                continue
            r_lo, r_hi = rho(s_lo, phi_lo, j), rho(s_hi, phi_hi, j)
            if r_lo == 0.0:
                r_lo = -r_hi  # treat exact zero at a node as a crossing
            if r_lo * r_hi > 0.0:
                continue
            lo, hi = s_lo, s_hi
            phi_a, rho_a = phi_lo, r_lo
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                phi_m = phi_a + _wrap_pm_pi(raw_angle(mid) - phi_a)
                rho_m = rho(mid, phi_m, j)
                if rho_a * rho_m <= 0.0:
                    hi = mid
                else:
                    lo, phi_a, rho_a = mid, phi_m, rho_m
            s_root = 0.5 * (lo + hi)
            phi_root = phi_a + _wrap_pm_pi(raw_angle(s_root) - phi_a)
            t_root = min(max(t_of(phi_root, j), 0.0), t_max)
            x = x_of(s_root)
            y = y_of(t_root)
            res = float(np.linalg.norm(x - y))
            return float(s_root), float(t_root), res
        if margin_stop is not None and margin_stop(s_hi):
            break
    return None


def spiral_crossing(
    sys: LinearControlSystem,
    v,
    u: float,
    window_halfperiods: float = 8.0,
    tol: float = 1e-9,
) -> tuple[float, float]:
    """Times (s0, t0) with flow(s0, v, u_min) == flow(-t0, v(u_min), u).

    Realizes reaching the u_min equilibrium from ``v``: the forward u_min
    spiral from ``v`` meets the backward u-spiral emanating from that
    equilibrium.  The search covers ``window_halfperiods`` half periods in
    both time variables.

    Raises
    ------
    PreconditionViolated
        If the trace is not negative or u equals u_min.
    InvalidControl
        If ``u`` is outside the control range.
    NoIntersectionFound
        If no crossing with residual below tolerance exists in the window.
    """
    if is_trace_zero(sys) or sys.trace > 0.0:
        raise PreconditionViolated("spiral crossing requires a negative trace")
    if not sys.control_in_range(u):
        raise InvalidControl(f"control {u} outside range")
    urange = max(1.0, abs(sys.u_min), abs(sys.u_max))
    if abs(u - sys.u_min) <= 1e-12 * urange:
        raise PreconditionViolated("u must differ from u_min")
    v = as_vector(v)
    cf = sys.canonical
    e_min = equilibrium(sys, sys.u_min)
    scale = 1.0 + float(np.linalg.norm(cf.to_canonical(v)))
    if np.linalg.norm(v - e_min) <= 1e-12 * scale:
        return 0.0, 0.0
    e_u_c = cf.to_canonical(equilibrium(sys, u))
    e_min_c = cf.to_canonical(e_min)
    v_c = cf.to_canonical(v)
    half = sys.half_period
    s_max = window_halfperiods * half
    t_max = window_halfperiods * half

    def x_of(s):
        w = v_c - e_min_c
        g = math.exp(s * cf.eig_real)
        ang = s * cf.eig_imag
        rot = np.array([g * math.cos(ang), g * math.sin(ang)])
        return e_min_c + np.array(
            [rot[0] * w[0] - rot[1] * w[1], rot[1] * w[0] + rot[0] * w[1]]
        )

    found = _crossing_search(
        sys, x_of, s_max, e_u_c, e_min_c, zeta=-1.0, t_max=t_max
    )
    if found is None or found[2] > tol * scale:
        raise NoIntersectionFound(
            f"no spiral crossing within {window_halfperiods} half-periods "
            f"(residual {'n/a' if found is None else found[2]:.3g})"
        )
    return found[0], found[1]


def reach_plan(
    sys: LinearControlSystem,
    target,
    epsilon: float,
    pairs: int | None = None,
    max_pairs: int = 60,
    region: OrbitRegion | None = None,
) -> PlanResult:
    """Schedule from the u_min equilibrium to within ``epsilon`` of ``target``.

    The target must be interior to the region enclosed by the periodic orbit.
    The construction: (i) flow the target backward under u_min until it exits
    through the orbit's u_max arc, solving the crossing (exit point b, arc
    parameter t_b, exit time s0) to machine precision; (ii) from the u_min
    equilibrium, alternate extreme half turns for k pairs, converging
    geometrically (factor e^{2*pi*eig_real/eig_imag} per pair) to the arc's
    start corner; (iii) splice the partial arc to b and the forward u_min arc
    of duration s0.  Controls never leave {u_min, u_max}.

    For a positive trace the plan is computed on the time-reversed system
    (``time_reversed`` is set); a zero trace is rejected.

    Parameters
    ----------
    pairs : int, optional
        Fixed number of half-turn pairs (measurement mode); default chooses
        the smallest count predicted to beat ``epsilon`` and retries upward
        until the simulated error passes.

    Raises
    ------
    TargetNotInterior
        If the target is not strictly inside the region.
    EpsilonTooSmall
        If ``max_pairs`` pairs cannot reach the requested accuracy.
    TraceZero
        Inside the zero-trace band.
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    if is_trace_zero(sys):
        raise TraceZero("reach planning needs a nonzero trace")
    time_reversed = sys.trace > 0.0
    work = sys.time_reversed() if time_reversed else sys
    if region is None:
        region = build_orbit_region(work)
    target = as_vector(target)
    if region.contains(target).verdict is not Membership.INTERIOR:
        raise TargetNotInterior("reach target must be interior to the region")

    cf = work.canonical
    ei, er = cf.eig_imag, cf.eig_real
    half = work.half_period
    q = math.exp(math.pi * er / ei)
    e_min = equilibrium(work, work.u_min)
    e_min_c = cf.to_canonical(e_min)
    e_max_c = cf.to_canonical(equilibrium(work, work.u_max))
    p_minus_c = cf.to_canonical(region.p_minus)
    start_gap = float(np.linalg.norm(e_min_c - p_minus_c))
    scale = max(1.0, region.scale)

    if np.linalg.norm(cf.to_canonical(target) - e_min_c) <= 1e-12 * scale:
        return _certified(work, e_min, target, (), time_reversed)

    # (i) exact exit through the u_max arc via the backward u_min flow.
    target_c = cf.to_canonical(target)

    def x_of(s):
        w = target_c - e_min_c
        g = math.exp(-s * er)
        ang = -s * ei
        return e_min_c + np.array(
            [
                g * math.cos(ang) * w[0] - g * math.sin(ang) * w[1],
                g * math.sin(ang) * w[0] + g * math.cos(ang) * w[1],
            ]
        )

    def well_outside(s):
        pt = cf.from_canonical(x_of(s))
        return region.margin(pt) < -0.2 * scale

    r_target = float(np.linalg.norm(target_c - e_min_c))
    r_exit = float(np.linalg.norm(p_minus_c - e_min_c)) / max(q, 1e-300)
    s_cap = (math.log(max(r_exit / max(r_target, 1e-300), 1.0)) / max(-er, 1e-300)) + 4.0 * half
    found = _crossing_search(
        work,
        x_of,
        s_cap,
        e_max_c,
        p_minus_c,
        zeta=1.0,
        t_max=half * (1.0 + 1e-12),
        grid_per_half=128,
        margin_stop=well_outside,
    )
    if found is None or found[2] > 1e-9 * scale:
        raise NoIntersectionFound("backward exit through the boundary arc not found")
    s0, t_b, _ = found

    # (ii)+(iii): choose pair count, assemble, certify.
    err0 = start_gap
    if pairs is None:
        want = max(epsilon / 4.0, 1e-13 * scale)
        k = 1
        while err0 * q ** (2 * k) > want and k < max_pairs:
            k += 1
    else:
        k = pairs

    while True:
        schedule = [(work.u_max, half), (work.u_min, half)] * k
        schedule.append((work.u_max, t_b))
        schedule.append((work.u_min, s0))
        plan = _certified(work, e_min, target, schedule, time_reversed)
        if pairs is not None or plan.endpoint_error <= epsilon:
            if pairs is None and plan.endpoint_error > epsilon:
                raise EpsilonTooSmall(
                    f"error {plan.endpoint_error:.3g} above epsilon after {k} pairs"
                )
            return plan
        if k >= max_pairs:
            raise EpsilonTooSmall(
                f"error {plan.endpoint_error:.3g} above epsilon after {k} pairs"
            )
        k += 1
