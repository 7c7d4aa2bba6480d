"""Control sets of planar linear control systems with complex-eigenvalue drift.

Closed-form canonical forms, exact flows, the periodic boundary orbit and its
enclosed region, constructive trajectory planners, and brute-force grid
oracles, plus a JSON/CSV/SVG command-line frontend.
"""

from .errors import (
    DegenerateSpiral,
    EmptySet,
    EpsilonTooSmall,
    InvalidControl,
    NoIntersectionFound,
    NotComplexSpectrum,
    OffLine,
    OutOfDomain,
    ParseError,
    PlanarControlError,
    PreconditionViolated,
    TargetNotInterior,
    TraceNotZero,
    TraceZero,
    ValidationError,
    ZeroVector,
)
from .planar import (
    CanonicalForm,
    canonicalize,
    discriminant,
    line_coordinate,
    matrix_exp,
    perp,
    rotation,
)
from .system import (
    ControlRangeWarning,
    LinearControlSystem,
    Trajectory,
    equilibrium,
    flow,
    simulate,
    spiral,
)
from .geometry import (
    InvarianceReport,
    Membership,
    MembershipVerdict,
    OrbitRegion,
    SpiralRegion,
    angle_between,
    build_orbit_region,
    check_region_invariance,
    polyline_distance,
    region_contains,
    tangent_margin,
    tangent_margin_grid,
)
from .controlset import (
    BoundaryOrbit,
    Classification,
    ControlSetInfo,
    SweepPoint,
    classify,
    control_sets,
    half_turn_fixed_points,
    half_turn_iterates,
    periodic_orbit,
    sweep_control_ranges,
)
from .planner import PlanResult, hop_plan, loop_plan, reach_plan, spiral_crossing
from .oracle import (
    DistanceBoundReport,
    GridSpec,
    ReachSet,
    check_distance_contraction,
    default_grid_spec,
    grid_reachable_set,
    hausdorff,
)

__version__ = "0.1.0"
