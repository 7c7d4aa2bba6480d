"""Command-line frontend: parse a system config, run analyses, emit artifacts.

Subcommands: analyze, orbit, member, plan, reach, sweep.  The config is a
single JSON document (no environment variables), outputs are JSON/CSV files
written atomically plus an optional SVG, and float serialization uses the
shortest round-trip decimal so reruns are byte-identical.

Exit codes: 0 success; 2 config or system validation failure; 3 planner
failure; 4 I/O failure.
"""

import argparse
import json
import os
import sys as _sys
from dataclasses import dataclass

import numpy as np

from .controlset import (
    Classification,
    classify,
    periodic_orbit,
    sweep_control_ranges,
)
from .errors import (
    EpsilonTooSmall,
    InvalidControl,
    NoIntersectionFound,
    NotComplexSpectrum,
    ParseError,
    PreconditionViolated,
    TargetNotInterior,
    TraceNotZero,
    TraceZero,
    ValidationError,
)
from .geometry import build_orbit_region, line_order_coordinates
from .oracle import GridSpec, default_grid_spec, grid_reachable_set
from .planner import hop_plan, reach_plan
from .svg import render_svg
from .system import LinearControlSystem, equilibrium, flow, simulate

__all__ = ["SystemConfig", "main", "parse_config", "run"]

_PLANNER_ERRORS = (
    TargetNotInterior,
    EpsilonTooSmall,
    NoIntersectionFound,
    TraceNotZero,
    InvalidControl,
    PreconditionViolated,
)


@dataclass
class SystemConfig:
    """Validated contents of a config document."""

    a: np.ndarray
    eta: np.ndarray
    u_min: float
    u_max: float
    samples: int = 256
    tau_grid: int = 512
    epsilon: float = 1e-4
    seed: int = 0
    dx: float = 0.02
    dt: float = 0.05
    horizon: float = 30.0
    bounds: tuple | None = None
    point: np.ndarray | None = None
    start: np.ndarray | None = None
    u0: float | None = None
    target: np.ndarray | None = None
    sweep_nu: float | None = None
    sweep_grid: list | None = None


def _vector(doc, key, required=False):
    if key not in doc:
        if required:
            raise ValidationError(f"missing required field '{key}'")
        return None
    try:
        v = np.asarray(doc[key], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"field '{key}' must be a pair of numbers") from exc
    if v.shape != (2,) or not np.all(np.isfinite(v)):
        raise ValidationError(f"field '{key}' must be a pair of finite numbers")
    return v


def parse_config(text: str) -> SystemConfig:
    """Parse and validate a config document.

    Raises
    ------
    ParseError
        If the text is not well-formed JSON.
    ValidationError
        Naming the first violated invariant otherwise.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValidationError("config must be a JSON object")
    raw_a = doc.get("a", doc.get("A"))
    if raw_a is None:
        raise ValidationError("missing required field 'a'")
    try:
        a = np.asarray(raw_a, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError("field 'a' must be a 2x2 matrix of numbers") from exc
    if a.shape != (2, 2) or not np.all(np.isfinite(a)):
        raise ValidationError("field 'a' must be a 2x2 matrix of finite numbers")
    eta = _vector(doc, "eta", required=True)
    if eta[0] == 0.0 and eta[1] == 0.0:
        raise ValidationError("eta must be nonzero")
    omega = doc.get("omega")
    if omega is None or np.asarray(omega, dtype=float).shape != (2,):
        raise ValidationError("field 'omega' must be [u_min, u_max]")
    u_min, u_max = (float(x) for x in omega)
    if not u_min < u_max:
        raise ValidationError("u- < u+ required")
    tr = a[0, 0] + a[1, 1]
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    if tr * tr - 4.0 * det >= 0.0:
        raise ValidationError(
            "discriminant nonnegative (complex eigenvalue pair required)"
        )
    cfg = SystemConfig(a=a, eta=eta, u_min=u_min, u_max=u_max)
    for key, attr, cast in (
        ("samples", "samples", int),
        ("tau_grid", "tau_grid", int),
        ("epsilon", "epsilon", float),
        ("seed", "seed", int),
        ("u0", "u0", float),
    ):
        if key in doc:
            try:
                setattr(cfg, attr, cast(doc[key]))
            except (TypeError, ValueError) as exc:
                raise ValidationError(f"field '{key}' must be a number") from exc
    grid = doc.get("grid", {})
    if not isinstance(grid, dict):
        raise ValidationError("field 'grid' must be an object")
    for key, attr in (("dx", "dx"), ("dt", "dt"), ("horizon", "horizon")):
        if key in grid:
            cfg.__setattr__(attr, float(grid[key]))
    if "bounds" in grid:
        b = np.asarray(grid["bounds"], dtype=float)
        if b.shape != (4,):
            raise ValidationError("grid.bounds must be [xmin, xmax, ymin, ymax]")
        cfg.bounds = tuple(float(x) for x in b)
    cfg.point = _vector(doc, "point")
    cfg.start = _vector(doc, "start")
    cfg.target = _vector(doc, "target")
    sweep = doc.get("sweep")
    if sweep is not None:
        if not isinstance(sweep, dict) or "nu" not in sweep or "grid" not in sweep:
            raise ValidationError("field 'sweep' must carry 'nu' and 'grid'")
        cfg.sweep_nu = float(sweep["nu"])
        try:
            cfg.sweep_grid = [(float(p[0]), float(p[1])) for p in sweep["grid"]]
        except (TypeError, ValueError, IndexError) as exc:
            raise ValidationError("sweep.grid must be a list of [alpha, rho]") from exc
    return cfg


def build_system(cfg: SystemConfig) -> LinearControlSystem:
    try:
        return LinearControlSystem(cfg.a, cfg.eta, cfg.u_min, cfg.u_max)
    except (ValueError, NotComplexSpectrum) as exc:
        raise ValidationError(str(exc)) from exc


def _fmt(x: float) -> str:
    return repr(float(x))


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _write_text(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _write_json(path: str, payload: dict) -> None:
    _write_text(path, json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")


def _write_csv(path: str, header: str, rows) -> None:
    lines = [header]
    lines.extend(",".join(cells) for cells in rows)
    _write_text(path, "\n".join(lines) + "\n")


def _check(name: str, passed: bool, margin: float) -> dict:
    return {"name": name, "passed": bool(passed), "margin": float(margin)}


def _analysis_checks(sys_: LinearControlSystem, region, seed: int) -> list[dict]:
    work = region.work_system
    half = work.half_period
    scale = max(1.0, region.scale)
    res_minus = float(
        np.linalg.norm(flow(work, half, region.p_plus, work.u_min) - region.p_minus)
    )
    res_plus = float(
        np.linalg.norm(flow(work, half, region.p_minus, work.u_max) - region.p_plus)
    )
    poly = region.boundary
    closure = float(np.linalg.norm(poly[0] - poly[-1]))
    coords = line_order_coordinates(region)
    order_vals = [coords["p_minus"], coords["v_u_min"], coords["v_u_max"], coords["p_plus"]]
    order_margin = min(b - a for a, b in zip(order_vals, order_vals[1:]))
    rng = np.random.default_rng(seed)
    xmin, xmax = poly[:, 0].min(), poly[:, 0].max()
    ymin, ymax = poly[:, 1].min(), poly[:, 1].max()
    pts = np.stack(
        [rng.uniform(xmin, xmax, 800), rng.uniform(ymin, ymax, 800)], axis=1
    )
    inside = pts[region.margins_many(pts) > 0.0][:200]
    worst = 0.0
    if len(inside):
        us = rng.uniform(work.u_min, work.u_max, len(inside))
        ss = rng.uniform(0.0, 3.0 * half, len(inside))
        moved = np.array(
            [flow(work, s, v, u) for v, u, s in zip(inside, us, ss)]
        )
        worst = float(region.margins_many(moved).min())
    return [
        _check("half_turn_closure_to_p_minus", res_minus < 1e-9 * scale, res_minus),
        _check("half_turn_closure_to_p_plus", res_plus < 1e-9 * scale, res_plus),
        _check("boundary_polyline_closed", closure < 1e-9 * scale, closure),
        _check("equilibrium_line_order", order_margin > 0.0, order_margin),
        _check("forward_invariance_sample", worst >= -1e-6 * scale, worst),
    ]


def run(command: str, cfg: SystemConfig, args) -> dict:
    """Execute one subcommand; returns the run report (also written to disk)."""
    sys_ = build_system(cfg)
    out_dir = args.out
    os.makedirs(out_dir, exist_ok=True)
    samples = args.samples if args.samples is not None else cfg.samples
    epsilon = args.epsilon if args.epsilon is not None else cfg.epsilon
    dx = args.grid_dx if args.grid_dx is not None else cfg.dx
    dt = args.grid_dt if args.grid_dt is not None else cfg.dt
    horizon = args.horizon if args.horizon is not None else cfg.horizon
    kind = classify(sys_)
    report: dict = {
        "command": command,
        "classification": kind.value,
        "p_plus": None,
        "p_minus": None,
        "orbit_samples": 0,
        "checks": [],
        "files": [],
    }
    files: list[tuple[str, str]] = []  # (name, kind) with kind json/csv/svg
    svg_layers: list[np.ndarray] = []
    svg_markers: list[np.ndarray] = []

    region = None
    if kind is not Classification.CONTROLLABLE_TRACE_ZERO:
        region = build_orbit_region(
            sys_, samples_per_arc=samples, tau_grid=cfg.tau_grid
        )
        report["p_plus"] = region.p_plus
        report["p_minus"] = region.p_minus
        report["orbit_samples"] = len(region.boundary)
        svg_layers.append(region.boundary)
        svg_markers.extend(
            [
                region.p_plus,
                region.p_minus,
                equilibrium(sys_, sys_.u_min),
                equilibrium(sys_, sys_.u_max),
            ]
        )

    if command == "analyze":
        if region is not None:
            report["checks"] = _analysis_checks(sys_, region, cfg.seed)
        path = os.path.join(out_dir, "analyze.json")
        payload = dict(report)
        payload["files"] = ["analyze.json"]
        _write_json(path, payload)
        files.append(("analyze.json", "json"))

    elif command == "orbit":
        if region is None:
            raise TraceZero("orbit subcommand needs a nonzero trace")
        orbit = periodic_orbit(sys_, samples)
        rows = []
        half = orbit.half_period
        n = len(orbit.arc_minus) - 1
        for i, pt in enumerate(orbit.arc_minus):
            rows.append(
                (_fmt(half * i / n), _fmt(pt[0]), _fmt(pt[1]), _fmt(sys_.u_min))
            )
        for i, pt in enumerate(orbit.arc_plus[1:], start=1):
            rows.append(
                (_fmt(half + half * i / n), _fmt(pt[0]), _fmt(pt[1]), _fmt(sys_.u_max))
            )
        _write_csv(os.path.join(out_dir, "orbit.csv"), "t,x,y,u", rows)
        files.append(("orbit.csv", "csv"))

    elif command == "member":
        if cfg.point is None:
            raise ValidationError("member subcommand needs a 'point' in the config")
        if region is None:
            verdict = {"verdict": "interior", "margin": None}
        else:
            v = region.contains(cfg.point)
            verdict = {"verdict": v.verdict.value, "margin": v.margin}
        report["member"] = verdict
        _write_json(
            os.path.join(out_dir, "member.json"),
            {"point": cfg.point, **verdict},
        )
        files.append(("member.json", "json"))
        svg_markers.append(np.asarray(cfg.point, dtype=float))

    elif command == "plan":
        if kind is Classification.CONTROLLABLE_TRACE_ZERO:
            if cfg.start is None:
                raise ValidationError("plan subcommand needs a 'start' in the config")
            u0 = cfg.u0 if cfg.u0 is not None else 0.5 * (sys_.u_min + sys_.u_max)
            plan = hop_plan(sys_, cfg.start, u0)
        else:
            if cfg.target is None:
                raise ValidationError("plan subcommand needs a 'target' in the config")
            plan = reach_plan(sys_, cfg.target, epsilon, region=region)
        rows = [
            (str(i), _fmt(u), _fmt(dtt))
            for i, (u, dtt) in enumerate(plan.schedule)
        ]
        _write_csv(os.path.join(out_dir, "plan.csv"), "index,u,dt", rows)
        files.append(("plan.csv", "csv"))
        report["plan"] = {
            "start": plan.start,
            "goal": plan.goal,
            "endpoint": plan.endpoint,
            "endpoint_error": plan.endpoint_error,
            "hops": plan.hops,
            "time_reversed": plan.time_reversed,
        }
        _write_json(os.path.join(out_dir, "plan.json"), report["plan"])
        files.append(("plan.json", "json"))
        sim_sys = sys_.time_reversed() if plan.time_reversed else sys_
        traj = simulate(sim_sys, plan.start, plan.schedule)
        svg_layers.append(traj.dense_states)
        svg_markers.extend([plan.start, plan.goal])

    elif command == "reach":
        start = cfg.start
        if start is None:
            start = equilibrium(sys_, 0.5 * (sys_.u_min + sys_.u_max))
        start = np.asarray(start, dtype=float)
        try:
            if cfg.bounds is not None:
                spec = GridSpec(bounds=cfg.bounds, dx=dx, dt=dt, horizon=horizon)
            else:
                if region is not None:
                    base = default_grid_spec(sys_, dx=dx, dt=dt, horizon=horizon)
                    bounds = list(base.bounds)
                else:
                    anchors = np.vstack(
                        [
                            equilibrium(sys_, sys_.u_min),
                            equilibrium(sys_, sys_.u_max),
                            start,
                        ]
                    )
                    c = anchors.mean(axis=0)
                    hs = max(float(np.abs(anchors - c).max()) * 3.0, 10.0 * dx)
                    bounds = [c[0] - hs, c[0] + hs, c[1] - hs, c[1] + hs]
                # Grow the default box if the start sits outside it.
                pad = 2.0 * dx
                bounds[0] = min(bounds[0], start[0] - pad)
                bounds[1] = max(bounds[1], start[0] + pad)
                bounds[2] = min(bounds[2], start[1] - pad)
                bounds[3] = max(bounds[3], start[1] + pad)
                spec = GridSpec(bounds=tuple(bounds), dx=dx, dt=dt, horizon=horizon)
            reach = grid_reachable_set(sys_, start, spec)
        except ValueError as exc:
            raise ValidationError(str(exc)) from exc
        pts = reach.occupied_points()
        _write_csv(
            os.path.join(out_dir, "reach.csv"),
            "x,y",
            ((_fmt(p[0]), _fmt(p[1])) for p in pts),
        )
        files.append(("reach.csv", "csv"))
        report["reach"] = {
            "occupied": reach.occupied_count(),
            "spill": reach.spill_count,
            "steps": reach.steps_run,
            "bounds": list(spec.bounds),
        }
        _write_json(os.path.join(out_dir, "reach.json"), report["reach"])
        files.append(("reach.json", "json"))
        if not svg_layers:
            svg_layers.append(pts)
        svg_markers.extend(pts[:: max(1, len(pts) // 400)])

    elif command == "sweep":
        if cfg.sweep_nu is None or not cfg.sweep_grid:
            raise ValidationError("sweep subcommand needs 'sweep.nu' and 'sweep.grid'")
        points = sweep_control_ranges(
            sys_.a, sys_.eta, cfg.sweep_nu, cfg.sweep_grid, samples_per_arc=samples
        )
        rows = [
            (
                _fmt(p.alpha),
                _fmt(p.rho),
                _fmt(p.p_plus[0]),
                _fmt(p.p_plus[1]),
                _fmt(p.p_minus[0]),
                _fmt(p.p_minus[1]),
                _fmt(p.hausdorff_prev),
            )
            for p in points
        ]
        _write_csv(
            os.path.join(out_dir, "sweep.csv"),
            "alpha,rho,p_plus_x,p_plus_y,p_minus_x,p_minus_y,hausdorff_prev",
            rows,
        )
        files.append(("sweep.csv", "csv"))
        report["sweep"] = {
            "points": len(points),
            "p_plus_coordinates": [p.p_plus_coordinate for p in points],
        }
        for p in points[-3:]:
            svg_layers.append(p.boundary)

    else:  # pragma: no cover - argparse restricts choices
        raise ValidationError(f"unknown command {command}")

    if args.svg is not None:
        if not svg_layers:
            raise ValidationError("nothing to render for this command")
        _write_text(args.svg, render_svg(svg_layers, svg_markers))
        files.append((args.svg, "svg"))

    report["files"] = [name for name, _ in files]
    return report


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="planarcontrol",
        description=(
            "Control sets and trajectory synthesis for planar linear control "
            "systems with complex-eigenvalue drift."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("analyze", "classification, fixed points, orbit and region checks"),
        ("orbit", "CSV polyline of the periodic boundary orbit"),
        ("member", "membership verdict for a configured point"),
        ("plan", "trajectory plan (hop plan or reach plan by trace sign)"),
        ("reach", "brute-force reachable-set occupancy CSV"),
        ("sweep", "control-range sweep of the orbit family"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("config", help="path to the JSON config document")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--svg", default=None, help="also render an SVG to this path")
        p.add_argument("--samples", type=int, default=None, help="samples per orbit arc")
        p.add_argument("--grid-dx", type=float, default=None, help="occupancy cell size")
        p.add_argument("--grid-dt", type=float, default=None, help="occupancy time step")
        p.add_argument("--horizon", type=float, default=None, help="occupancy horizon")
        p.add_argument("--epsilon", type=float, default=None, help="plan accuracy")
    args = parser.parse_args(argv)

    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=_sys.stderr)
        return 4
    try:
        cfg = parse_config(text)
        report = run(args.command, cfg, args)
    except (ParseError, ValidationError, TraceZero) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 2
    except _PLANNER_ERRORS as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 4
    print(json.dumps(_jsonable(report), indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
