"""The planar linear control system and its exact piecewise-constant solutions.

The system is ``v' = A v + u eta`` with ``u`` confined to a compact interval.
Because the drift has complex eigenvalues, every constant-control solution is
a closed-form spiral around the corresponding equilibrium, so trajectories for
piecewise-constant controls are concatenations of exact arcs: no ODE
integration happens anywhere in this package.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSpiral, InvalidControl
from .planar import CanonicalForm, as_matrix, as_vector, canonicalize, matrix_exp

__all__ = [
    "ControlRangeWarning",
    "LinearControlSystem",
    "Trajectory",
    "equilibrium",
    "flow",
    "flow_many",
    "simulate",
    "spiral",
]


class ControlRangeWarning(UserWarning):
    """A control value outside the admissible range was accepted."""


@dataclass(frozen=True)
class LinearControlSystem:
    """Planar linear control system ``v' = A v + u eta``, u in [u_min, u_max].

    The drift must have a complex eigenvalue pair (hence det A > 0 and A is
    invertible).  Canonical data and A^-1 eta are computed once and cached;
    instances are immutable and safe to share across threads.
    """

    a: np.ndarray
    eta: np.ndarray
    u_min: float
    u_max: float
    canonical: CanonicalForm = field(init=False, repr=False)
    inv_a_eta: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        a = as_matrix(self.a)
        eta = as_vector(self.eta)
        a.setflags(write=False)
        eta.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "u_min", float(self.u_min))
        object.__setattr__(self, "u_max", float(self.u_max))
        if not self.u_min < self.u_max:
            raise ValueError("control range requires u_min < u_max")
        if eta[0] == 0.0 and eta[1] == 0.0:
            raise ValueError("control vector eta must be nonzero")
        cf = canonicalize(a)  # raises NotComplexSpectrum otherwise
        det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
        adj = np.array([[a[1, 1], -a[0, 1]], [-a[1, 0], a[0, 0]]])
        inv_a_eta = (adj @ eta) / det
        inv_a_eta.setflags(write=False)
        object.__setattr__(self, "canonical", cf)
        object.__setattr__(self, "inv_a_eta", inv_a_eta)

    @property
    def trace(self) -> float:
        return float(self.a[0, 0] + self.a[1, 1])

    @property
    def half_period(self) -> float:
        """Time of a half rotation in the canonical frame, pi / eig_imag."""
        return math.pi / self.canonical.eig_imag

    def time_reversed(self) -> "LinearControlSystem":
        """The system whose forward flow is this system's backward flow.

        Reversing time negates the whole right-hand side, so the reversed
        system is (-A, -eta) with the same control range and the same
        equilibria.
        """
        return LinearControlSystem(-self.a, -self.eta, self.u_min, self.u_max)

    def control_in_range(self, u: float, slack: float = 1e-9) -> bool:
        pad = slack * (1.0 + max(abs(self.u_min), abs(self.u_max)))
        return self.u_min - pad <= u <= self.u_max + pad

    def propagator(self, t: float) -> np.ndarray:
        """exp(t A) via the closed form."""
        cf = self.canonical
        gen = (self.a - cf.eig_real * np.eye(2)) / cf.eig_imag
        g = math.exp(t * cf.eig_real)
        ang = t * cf.eig_imag
        return g * math.cos(ang) * np.eye(2) + g * math.sin(ang) * gen


def equilibrium(sys: LinearControlSystem, u: float) -> np.ndarray:
    """Equilibrium -u A^-1 eta of the constant-control vector field.

    Any real ``u`` is accepted; values outside the control range are flagged
    with a ControlRangeWarning (the range sweep evaluates them on purpose).
    """
    if not sys.control_in_range(u):
        warnings.warn(
            f"control {u} outside range [{sys.u_min}, {sys.u_max}]",
            ControlRangeWarning,
            stacklevel=2,
        )
    return -u * sys.inv_a_eta


def flow(sys: LinearControlSystem, s: float, v, u: float) -> np.ndarray:
    """Exact constant-control solution ``exp(sA)(v - v(u)) + v(u)``.

    ``s`` may have either sign.  ``flow(0, v, u) = v`` and the equilibrium is
    a fixed point for every ``s``.
    """
    v = as_vector(v)
    center = -u * sys.inv_a_eta
    cf = sys.canonical
    w = v - center
    gen_w = (sys.a @ w - cf.eig_real * w) / cf.eig_imag
    g = math.exp(s * cf.eig_real)
    ang = s * cf.eig_imag
    return center + g * math.cos(ang) * w + g * math.sin(ang) * gen_w


def flow_many(sys: LinearControlSystem, s, v, u: float) -> np.ndarray:
    """Vectorized ``flow`` over an array of times ``s``; returns (n, 2)."""
    s = np.asarray(s, dtype=float)
    v = as_vector(v)
    center = -u * sys.inv_a_eta
    cf = sys.canonical
    w = v - center
    gen_w = (sys.a @ w - cf.eig_real * w) / cf.eig_imag
    g = np.exp(s * cf.eig_real)
    ang = s * cf.eig_imag
    return center + np.outer(g * np.cos(ang), w) + np.outer(g * np.sin(ang), gen_w)


def spiral(a, tau: float, v1, v2) -> np.ndarray:
    """The spiral ``exp(tau A)(v1 - v2) + v2`` around ``v2`` through ``v1``.

    Raises
    ------
    DegenerateSpiral
        If v1 == v2 (the excluded diagonal).
    NotComplexSpectrum
        Propagated from the closed-form exponential.
    """
    v1 = as_vector(v1)
    v2 = as_vector(v2)
    if v1[0] == v2[0] and v1[1] == v2[1]:
        raise DegenerateSpiral("spiral endpoints coincide")
    return matrix_exp(as_matrix(a), tau) @ (v1 - v2) + v2


@dataclass(frozen=True)
class Trajectory:
    """Piecewise-exact solution for a piecewise-constant control.

    ``times``/``states`` hold the exact segment endpoints (strictly increasing
    time stamps; zero-duration segments contribute no stamp).  ``dense_times``
    and ``dense_states`` sample each arc at a configurable step for plotting
    and membership sweeps.  For a backward run, stamps are elapsed time along
    the reversed-time path.
    """

    times: np.ndarray
    states: np.ndarray
    schedule: tuple
    dense_times: np.ndarray
    dense_states: np.ndarray
    backward: bool = False

    @property
    def endpoint(self) -> np.ndarray:
        return self.states[-1]

    @property
    def duration(self) -> float:
        return float(self.times[-1])


def simulate(
    sys: LinearControlSystem,
    v0,
    schedule,
    backward: bool = False,
    sample_step: float | None = None,
) -> Trajectory:
    """Run a schedule of ``(u, dt)`` segments from ``v0`` with exact arcs.

    Each segment endpoint is ``flow(dt, previous endpoint, u)``; dense samples
    at ``sample_step`` (default half_period / 256) are recorded alongside.
    With ``backward=True`` every segment is traversed in reversed time
    (durations stay nonnegative).

    Raises
    ------
    InvalidControl
        If some segment control is outside the admissible range.
    ValueError
        If some segment duration is negative.
    """
    v0 = as_vector(v0)
    segs = [(float(u), float(dt)) for u, dt in schedule]
    for u, dt in segs:
        if not sys.control_in_range(u):
            raise InvalidControl(
                f"control {u} outside range [{sys.u_min}, {sys.u_max}]"
            )
        if dt < 0.0:
            raise ValueError("segment durations must be nonnegative")
    if sample_step is None:
        sample_step = sys.half_period / 256.0
    sign = -1.0 if backward else 1.0

    times = [0.0]
    states = [v0]
    dense_times = [0.0]
    dense_states = [v0]
    t = 0.0
    v = v0
    for u, dt in segs:
        if dt == 0.0:
            continue
        n = max(2, int(math.ceil(dt / sample_step)) + 1)
        local = np.linspace(0.0, dt, n)
        pts = flow_many(sys, sign * local, v, u)
        dense_times.extend((t + local[1:]).tolist())
        dense_states.extend(pts[1:])
        v = pts[-1]
        t += dt
        times.append(t)
        states.append(v)
    return Trajectory(
        times=np.array(times),
        states=np.vstack(states),
        schedule=tuple(segs),
        dense_times=np.array(dense_times),
        dense_states=np.vstack(dense_states),
        backward=backward,
    )
