"""Spiral regions, the tangent-margin function, invariance, and distances."""

import math

import numpy as np
import pytest

from planarcontrol.errors import (
    OutOfDomain,
    PreconditionViolated,
    TraceZero,
    ZeroVector,
)
from planarcontrol.geometry import (
    Membership,
    SpiralRegion,
    angle_between,
    build_orbit_region,
    check_region_invariance,
    polyline_distance,
    region_contains,
    tangent_margin,
    tangent_margin_grid,
)
from planarcontrol.planar import canonicalize, line_coordinate
from planarcontrol.system import LinearControlSystem, equilibrium, flow

from conftest import converged_fixed_points, random_system


@pytest.fixture
def canonical_cf():
    return canonicalize([[-1.0, -1.0], [1.0, -1.0]])  # eig -1 +/- 1i, basis I


@pytest.fixture
def unit_region(canonical_cf):
    return SpiralRegion(np.array([1.0, 0.0]), np.zeros(2), canonical_cf)


def _random_region(rng):
    """Random spiral region with eig_real < 0 in a random (skewed) basis."""
    sys = random_system(rng, trace_sign=-1)
    cf = sys.canonical
    v2 = rng.normal(0.0, 1.0, 2)
    while True:
        delta = rng.normal(0.0, 1.0, 2)
        if np.linalg.norm(delta) > 0.3:
            break
    return SpiralRegion(v2 + delta, v2, cf, tau_grid=256)


def _sample_inside(rng, region, margin_floor=0.0):
    """Rejection-sample a point of the region (canonical-frame bounding box)."""
    cf = region.canonical
    z1 = cf.to_canonical(region.v1)
    z2 = cf.to_canonical(region.v2)
    lo = np.minimum(z1, z2) - 2.0 * region.scale
    hi = np.maximum(z1, z2) + 2.0 * region.scale
    while True:
        zc = rng.uniform(lo, hi)
        v = cf.from_canonical(zc)
        if region.margins(v)[0] > margin_floor:
            return v


def test_region_contains_examples(unit_region):
    v1 = unit_region.v1
    mid = 0.5 * (unit_region.v1 + unit_region.v2)
    reflected = unit_region.v2 - np.array([0.0, 1.0])  # across the chord line
    assert region_contains(unit_region, v1).verdict is Membership.BOUNDARY
    assert region_contains(unit_region, mid).verdict is Membership.BOUNDARY
    assert region_contains(unit_region, reflected).verdict is Membership.EXTERIOR


def test_region_contains_interior_point(unit_region):
    assert region_contains(unit_region, [0.4, 0.1]).verdict is Membership.INTERIOR


def test_angle_between_examples():
    assert angle_between([2.0, 0.0], [3.0, 0.0]) == 0.0
    assert angle_between([1.0, 0.0], [0.0, 2.0]) == pytest.approx(math.pi / 2)
    assert angle_between([1.0, 1.0], [-2.0, -2.0]) == pytest.approx(math.pi)
    with pytest.raises(ZeroVector):
        angle_between([0.0, 0.0], [1.0, 0.0])


def test_tangent_margin_zero_at_origin_corner(canonical_cf):
    v1 = np.array([1.0, 0.0])
    # w1 = v1 with w2 shrunk toward the center: the difference against the
    # tau = 0 tangent base point vanishes at s = 0.
    val = tangent_margin(canonical_cf, 0.0, 0.0, v1, np.array([1e-9, 0.0]), v1)
    assert abs(val) < 1e-8


def test_tangent_margin_grid_nonnegative_for_admissible_data(canonical_cf):
    # The spec example's w1=(0.5, 0.3) lies just outside the region (see the
    # membership test below), so the nonnegativity claim applies to an
    # admissible w1 instead.
    v1 = np.array([1.0, 0.0])
    w2 = np.array([0.5, 0.0])
    w1 = np.array([0.5, 0.25])
    grid = tangent_margin_grid(canonical_cf, w1, w2, v1, s_count=64, tau_count=64)
    assert grid.min() >= -1e-9


def test_spec_example_point_is_not_admissible(unit_region):
    # Radius sqrt(0.34) ~ 0.58310 exceeds the boundary radius ~ 0.58248 at
    # its polar angle, so the proposition's precondition rejects it.
    verdict = region_contains(unit_region, [0.5, 0.3])
    assert verdict.verdict is Membership.EXTERIOR
    with pytest.raises(PreconditionViolated):
        check_region_invariance(unit_region, [0.5, 0.3], [0.5, 0.0])


def test_tangent_margin_regression_value(canonical_cf):
    # Frozen reference value at the center node of the 64x64 domain grid.
    v1 = np.array([1.0, 0.0])
    w2 = np.array([0.5, 0.0])
    w1 = np.array([0.5, 0.25])
    grid = tangent_margin_grid(canonical_cf, w1, w2, v1, s_count=64, tau_count=64)
    assert grid[32, 32] == pytest.approx(0.11271083424677937, rel=1e-12)


def test_tangent_margin_domain_and_preconditions(canonical_cf):
    v1 = np.array([1.0, 0.0])
    w2 = np.array([0.5, 0.0])
    w1 = np.array([0.5, 0.25])
    sigma = angle_between(v1, w1 - w2)
    with pytest.raises(OutOfDomain):
        tangent_margin(canonical_cf, (math.pi - sigma) + 1e-3, 0.0, w1, w2, v1)
    with pytest.raises(OutOfDomain):
        tangent_margin(canonical_cf, 0.0, math.pi + 1e-3, w1, w2, v1)
    with pytest.raises(PreconditionViolated):
        tangent_margin(canonical_cf, 0.0, 0.0, w1, np.array([0.5, 0.2]), v1)
    with pytest.raises(PreconditionViolated):
        tangent_margin(canonical_cf, 0.0, 0.0, w1, np.array([1.5, 0.0]), v1)


def test_tangent_margin_nonnegative_random_configurations():
    rng = np.random.default_rng(17)
    for _ in range(60):
        ei = rng.uniform(0.3, 2.0)
        er = -rng.uniform(0.05, 2.5) * ei
        cf = canonicalize([[er, -ei], [ei, er]])
        v1 = rng.normal(0.0, 1.5, 2)
        if np.linalg.norm(v1) < 0.3:
            continue
        region = SpiralRegion(v1, np.zeros(2), cf, tau_grid=256)
        w2 = rng.uniform(0.05, 1.0) * v1
        w1 = _sample_inside(rng, region)
        if np.linalg.norm(w1 - w2) < 1e-6:
            continue
        grid = tangent_margin_grid(cf, w1, w2, v1, s_count=48, tau_count=48)
        assert grid.min() >= -1e-9


def test_invariance_boundary_spiral(unit_region):
    # w1 = v1, w2 = v2: the moving spiral IS the region boundary arc.
    report = check_region_invariance(unit_region, unit_region.v1, unit_region.v2)
    assert report.worst_margin == pytest.approx(0.0, abs=1e-9)


def test_invariance_random_regions():
    rng = np.random.default_rng(23)
    for _ in range(60):
        region = _random_region(rng)
        t = rng.uniform(0.0, 1.0)
        w2 = region.v2 + t * (region.v1 - region.v2)
        w1 = _sample_inside(rng, region)
        if np.linalg.norm(
            region.canonical.to_canonical(w1) - region.canonical.to_canonical(w2)
        ) < 1e-9 * region.scale:
            continue
        report = check_region_invariance(region, w1, w2, s_samples=96)
        assert report.worst_margin >= -1e-9


def test_invariance_endpoint_lands_on_chord_interval(unit_region):
    # After time (pi - sigma)/eig_imag the moving point reaches the chord
    # line, between the arc's far endpoint and v1.
    rng = np.random.default_rng(29)
    cf = unit_region.canonical
    v1 = unit_region.v1
    far_end = np.array([-math.exp(-math.pi), 0.0])
    for _ in range(40):
        w2 = np.array([rng.uniform(0.05, 1.0), 0.0])
        w1 = _sample_inside(rng, unit_region)
        diff = w1 - w2
        if np.linalg.norm(diff) < 1e-6:
            continue
        sigma = angle_between(v1, diff)
        s_end = (math.pi - sigma) / cf.eig_imag
        # evaluate via the region's own spiral: exp(s Ac)(w1 - w2) + w2
        from planarcontrol.geometry import _spiral_points

        end = _spiral_points(cf, diff, np.array([s_end]))[0] + w2
        coord = line_coordinate(end, np.array([1.0, 0.0]), tol=1e-7)
        assert far_end[0] - 1e-7 <= coord <= v1[0] + 1e-7


def test_invariance_precondition_checks(unit_region):
    with pytest.raises(PreconditionViolated):
        check_region_invariance(unit_region, [0.4, 0.1], [0.5, 0.2])  # w2 off chord
    with pytest.raises(PreconditionViolated):
        check_region_invariance(unit_region, [0.5, 0.0], [0.5, 0.0])  # zero diff
    grow = SpiralRegion(
        np.array([1.0, 0.0]), np.zeros(2), canonicalize([[0.5, -1.0], [1.0, 0.5]])
    )
    with pytest.raises(PreconditionViolated):
        check_region_invariance(grow, [0.2, 0.1], [0.5, 0.0])  # eig_real > 0


def test_build_orbit_region_worked_values(s0):
    region = build_orbit_region(s0)
    np.testing.assert_allclose(
        region.p_plus, [0.5451657, 0.5451657], atol=5e-8
    )
    np.testing.assert_allclose(region.p_minus, -region.p_plus, atol=1e-15)
    # Cross-check against the iterate-convergence oracle.
    pp, _ = converged_fixed_points(s0)
    assert np.linalg.norm(region.p_plus - pp) < 1e-12


def test_build_orbit_region_line_order(s0):
    from planarcontrol.geometry import line_order_coordinates

    coords = line_order_coordinates(build_orbit_region(s0))
    assert (
        coords["p_minus"]
        < coords["v_u_min"]
        < coords["v_u_max"]
        < coords["p_plus"]
    )


def test_build_orbit_region_rejects_trace_zero(t0):
    with pytest.raises(TraceZero):
        build_orbit_region(t0)


def test_region_boundary_closed_random():
    rng = np.random.default_rng(37)
    for _ in range(25):
        sys = random_system(rng, trace_sign=rng.choice([-1, 1]))
        region = build_orbit_region(sys, samples_per_arc=128)
        poly = region.boundary
        assert np.linalg.norm(poly[0] - poly[-1]) < 1e-9 * max(1.0, region.scale)
        for point in (region.p_plus, region.p_minus):
            line_coordinate(point, sys.inv_a_eta, tol=1e-8)  # no OffLine


def test_time_reversed_region_is_same_set(s0):
    fwd = build_orbit_region(s0)
    rev = build_orbit_region(s0.time_reversed())
    assert rev.time_reversed
    # Same corners (roles swapped come back to the same coordinates).
    np.testing.assert_allclose(rev.p_plus, fwd.p_plus, atol=1e-12)
    rng = np.random.default_rng(43)
    pts = rng.uniform(-1.0, 1.0, (200, 2))
    m1 = fwd.margins_many(pts) > 0
    m2 = rev.margins_many(pts) > 0
    assert np.array_equal(m1, m2)


def test_contains_region_examples(s0):
    region = build_orbit_region(s0)
    assert region.contains(region.p_plus).verdict is Membership.BOUNDARY
    assert region.contains([0.0, 0.0]).verdict is Membership.INTERIOR
    assert region.contains([100.0, 100.0]).verdict is Membership.EXTERIOR


def test_exterior_distance_examples(s0):
    region = build_orbit_region(s0)
    assert region.exterior_distance([0.0, 0.0]) == 0.0
    # Just outside the far corner, along the outward boundary normal, the
    # nearest boundary point is the corner itself.
    work = region.work_system
    tangent = work.a @ (region.p_plus - equilibrium(work, work.u_min))
    inward = np.array([-tangent[1], tangent[0]])
    outward = -inward / np.linalg.norm(inward)
    probe = region.p_plus + 0.01 * outward
    assert region.exterior_distance(probe) == pytest.approx(0.01, abs=2e-4)


def test_exterior_distance_pinned_value(s0):
    # Value frozen from a refinement study (change < 1e-6 from 1024 samples on).
    region = build_orbit_region(s0, samples_per_arc=4096)
    assert region.exterior_distance([2.0, 2.0]) == pytest.approx(
        2.024470886186, abs=1e-6
    )
    # Refinement decreases the polyline distance monotonically to within 1e-6.
    coarse = build_orbit_region(s0, samples_per_arc=512)
    assert coarse.exterior_distance([2.0, 2.0]) >= region.exterior_distance(
        [2.0, 2.0]
    ) - 1e-12
    assert abs(
        coarse.exterior_distance([2.0, 2.0]) - region.exterior_distance([2.0, 2.0])
    ) < 1e-6


def test_forward_invariance_random_systems():
    rng = np.random.default_rng(47)
    for _ in range(30):
        sys = random_system(rng, trace_sign=-1)
        region = build_orbit_region(sys, samples_per_arc=256)
        pts = np.array([_sample_inside(rng, region.half_plus) for _ in range(5)])
        # also sample from the other half
        pts2 = np.array([_sample_inside(rng, region.half_minus) for _ in range(5)])
        for v in np.vstack([pts, pts2]):
            u = rng.uniform(sys.u_min, sys.u_max)
            s = rng.uniform(0.0, 3.0 * sys.half_period)
            moved = flow(sys, s, v, u)
            assert region.margin(moved) >= -1e-6 * max(1.0, region.scale)


def test_backward_invariance_positive_trace():
    # Positive trace: flows with s * trace < 0 (backward time) stay inside.
    rng = np.random.default_rng(53)
    for _ in range(15):
        sys = random_system(rng, trace_sign=1)
        region = build_orbit_region(sys, samples_per_arc=256)
        v = _sample_inside(rng, region.half_plus)
        u = rng.uniform(sys.u_min, sys.u_max)
        s = rng.uniform(0.0, 3.0 * sys.half_period)
        moved = flow(sys, -s, v, u)
        assert region.margin(moved) >= -1e-6 * max(1.0, region.scale)


def test_membership_equivariance_rotation_translation():
    rng = np.random.default_rng(59)
    for _ in range(25):
        region = _random_region(rng)
        theta = rng.uniform(0.0, 2.0 * math.pi)
        rot = np.array(
            [[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]]
        )
        shift = rng.normal(0.0, 2.0, 2)
        a_old = region.canonical.basis @ region.canonical.matrix() @ region.canonical.basis_inv
        cf_new = canonicalize(rot @ a_old @ rot.T)
        moved = SpiralRegion(
            rot @ region.v1 + shift, rot @ region.v2 + shift, cf_new, region.tau_grid
        )
        for _ in range(5):
            probe = rng.normal(0.0, 1.5, 2)
            m_old = region.margins(probe)[0]
            m_new = moved.margins(rot @ probe + shift)[0]
            assert m_new == pytest.approx(m_old, abs=1e-9 * (1.0 + abs(m_old)))


def test_polyline_distance_basics():
    poly = np.array([[0.0, 0.0], [1.0, 0.0]])
    d = polyline_distance(np.array([[0.5, 0.7], [2.0, 0.0], [-1.0, 0.0]]), poly)
    np.testing.assert_allclose(d, [0.7, 1.0, 1.0], atol=1e-15)
