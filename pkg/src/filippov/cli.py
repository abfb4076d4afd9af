"""Command line front end.

Subcommands: classify, certify, slow-fast, integrate, manifold, cross, all.
Each takes --config and --out and writes its artifacts under the output
directory.  Exit codes: 0 success, 1 computation failed, 2 bad
configuration or usage.

Artifacts are deterministic: floats are rendered with shortest round-trip
precision and no timestamps or machine identifiers are embedded, so a rerun
on the same config is byte-identical.  The JSON reports carry the tool
version, the sha256 of the config file and the tolerances used; grid rows
are {x, verdict, roots: [{t, dh_dt}]} and refined boundary locations land
in boundary_estimates.  Trajectory CSV columns are t, the tangential
coordinates, y, event.  Blow-up plot data columns are x, theta, r, chart.

FILIPPOV_THREADS caps the worker pool used for grid sweeps (default 1).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .blowup import slow_fast
from .config import ConfigError, SystemConfig, grid_points, load_config
from .cross import NonMonotoneTransitionError, stratified_slide_curve
from .expr import DomainError
from .dynamics import (
    IntegratorOptions,
    NoSlidingAtError,
    Trajectory,
    UnresolvedSingularityError,
    hausdorff,
    integrate,
    integrate_filippov,
    track_manifold,
)
from .regularize import HeightRoot, ValidationFailure, Verdict, certify, regularized_field
from .system import NotSlidingError, SigmaClass, classify_point


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("FILIPPOV_THREADS", "1")))
    except ValueError:
        return 1


def _map_grid(fn: Callable, xs: Sequence[float]) -> list:
    w = _workers()
    if w > 1:
        with ThreadPoolExecutor(max_workers=w) as pool:
            return list(pool.map(fn, xs))
    return [fn(x) for x in xs]


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n")


def _report_skeleton(cfg: SystemConfig) -> dict:
    return {
        "version": __version__,
        "config_sha256": cfg.sha256,
        "tolerances": {
            "class_tol": cfg.run.class_tol,
            "transversality_tol": cfg.run.transversality_tol,
            "zero_tol": cfg.run.zero_tol,
        },
    }


def _require_system(cfg: SystemConfig):
    if cfg.system is None:
        raise ConfigError("this command needs a [system] section")
    return cfg.system


def _refine_flip(predicate: Callable[[float], bool], lo: float, hi: float) -> float:
    """Bisect the boundary where predicate flips from True (lo) to False (hi)."""
    for _ in range(80):
        if hi - lo <= 1e-12:
            break
        mid = 0.5 * (lo + hi)
        if predicate(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _boundaries(xs: np.ndarray, labels: list[str], sliding: str, sewing: str,
                predicate: Callable[[float], bool]) -> list[float]:
    """Refined boundary locations between sliding and sewing runs.

    Runs of either certified label may be separated by up to two
    indeterminate or singular grid points; the flip inside the gap is then
    refined by bisection on ``predicate`` (True on the sliding side).
    """
    out: list[float] = []
    decided = [(i, lab) for i, lab in enumerate(labels) if lab in (sliding, sewing)]
    for (i, la), (j, lb) in zip(decided, decided[1:]):
        if la == lb or j - i > 3:
            continue
        lo, hi = float(xs[i]), float(xs[j])
        if la == sliding:
            out.append(_refine_flip(predicate, lo, hi))
        else:
            out.append(_refine_flip(lambda x: not predicate(x), lo, hi))
    return out


def _cmd_classify(cfg: SystemConfig, out: Path, grid) -> int:
    system = _require_system(cfg)
    xs = grid_points(grid)

    def job(x: float) -> str:
        return classify_point(system, float(x), cfg.run.class_tol).value

    labels = _map_grid(job, xs)
    predicate = lambda x: classify_point(system, x, cfg.run.class_tol) == SigmaClass.SLIDING
    report = _report_skeleton(cfg)
    report["grid"] = [
        {"x": float(x), "verdict": lab, "roots": []} for x, lab in zip(xs, labels)
    ]
    report["boundary_estimates"] = _boundaries(
        xs, labels, SigmaClass.SLIDING.value, SigmaClass.SEWING.value, predicate
    )
    _write_json(out / "classification.json", report)
    return 0


def _certificate_payload(cert) -> tuple[str, list[dict]]:
    roots = [{"t": r.t, "dh_dt": r.dh_dt} for r in cert.roots]
    return cert.verdict.value, roots


def _cmd_certify(cfg: SystemConfig, out: Path, grid) -> int:
    system = _require_system(cfg)
    xs = grid_points(grid)

    def job(x: float):
        return certify(
            system, cfg.transition, float(x),
            transversality_tol=cfg.run.transversality_tol,
            zero_tol=cfg.run.zero_tol,
        )

    certs = _map_grid(job, xs)
    labels = [c.verdict.value for c in certs]

    def predicate(x: float) -> bool:
        return job(x).verdict == Verdict.SLIDING_CERTIFIED

    report = _report_skeleton(cfg)
    report["grid"] = []
    for x, cert in zip(xs, certs):
        verdict, roots = _certificate_payload(cert)
        report["grid"].append({"x": float(x), "verdict": verdict, "roots": roots})
    report["boundary_estimates"] = _boundaries(
        xs, labels, Verdict.SLIDING_CERTIFIED.value, Verdict.SEWING_CERTIFIED.value, predicate
    )
    _write_json(out / "certificates.json", report)
    return 0


def _trajectory_csv(path: Path, coords: Sequence[str], traj: Trajectory) -> None:
    header = ["t", *coords, "event"]
    events: dict[float, list[str]] = {}
    for e in traj.events:
        events.setdefault(float(e.time), []).append(e.kind.value)
    lines = [",".join(header)]
    for t, state in zip(traj.times, traj.states):
        row = [repr(float(t))] + [repr(float(v)) for v in state]
        row.append(";".join(events.get(float(t), [])))
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n")


def _cmd_integrate(cfg: SystemConfig, out: Path, x0, t_span, mode: str, eps: float | None) -> int:
    system = _require_system(cfg)
    if x0 is None:
        raise ConfigError("integrate needs an initial state: set x0 in [run] or pass --from")
    opts = IntegratorOptions(
        abs_tol=cfg.run.abs_tol,
        rel_tol=cfg.run.rel_tol,
        max_step=cfg.run.max_step,
        class_tol=cfg.run.class_tol,
        lambda_tol=cfg.run.lambda_tol,
    )
    if mode == "filippov":
        traj = integrate_filippov(system, x0, t_span, opts)
    else:
        e = eps if eps is not None else cfg.run.epsilons[0]
        fn = lambda t, s: regularized_field(system, cfg.transition, e, s)
        traj = integrate(fn, x0, t_span, opts)
    _trajectory_csv(out / "trajectory.csv", system.coords, traj)
    return 0


def _cmd_slow_fast(cfg: SystemConfig, out: Path, grid) -> int:
    """Polar-cylinder plot data: the slow manifold on the divisor from the
    central chart, plus the saturation arcs from the side charts."""
    system = _require_system(cfg)
    sf = slow_fast(system, cfg.transition)
    xs = grid_points(grid)
    lines = ["x,theta,r,chart"]
    for x in xs:
        for root in sf.manifold_slice(float(x)):
            if isinstance(root, HeightRoot):
                theta = math.atan2(1.0, root.t)
                lines.append(f"{repr(float(x))},{repr(theta)},0.0,E")
    for x in (float(xs[0]), float(xs[-1])):
        for epstil in np.linspace(0.0, 1.0, 11):
            lines.append(f"{repr(x)},{repr(math.atan2(float(epstil), 1.0))},0.0,F+")
            lines.append(f"{repr(x)},{repr(math.atan2(float(epstil), -1.0))},0.0,F-")
    (out / "slowfast.csv").write_text("\n".join(lines) + "\n")
    return 0


def _cmd_manifold(cfg: SystemConfig, out: Path, grid) -> int:
    system = _require_system(cfg)
    xs = grid_points(grid)
    report = _report_skeleton(cfg)
    report["tracks"] = []
    for eps in cfg.run.epsilons:
        track = track_manifold(
            system, cfg.transition, eps, xs,
            transversality_tol=cfg.run.transversality_tol,
        )
        pts = track.as_array()
        sigma = np.column_stack([pts[:, 0], np.zeros(len(pts))])
        report["tracks"].append({
            "epsilon": eps,
            "hausdorff_to_sigma": hausdorff(pts, sigma),
            "points": [
                {"x": p.x, "t": p.t, "y": p.y, "dh_dt": p.dh_dt} for p in track.points
            ],
            "excluded": [{"x": x, "reason": reason} for x, reason in track.excluded],
        })
    _write_json(out / "manifold.json", report)
    return 0


def _cmd_cross(cfg: SystemConfig, out: Path) -> int:
    if cfg.cross is None:
        raise ConfigError("this command needs a [cross] section")
    epsilons = cfg.run.epsilons
    etas = cfg.run.etas or epsilons
    if len(etas) != len(epsilons):
        raise ConfigError("epsilons and etas must have the same length")
    report = _report_skeleton(cfg)
    report["pairs"] = []
    for eps, eta in zip(epsilons, etas):
        curve = stratified_slide_curve(cfg.cross, eps, eta)
        report["pairs"].append({
            "epsilon": eps,
            "eta": eta,
            "t0": curve.t0,
            "u0": curve.u0,
            "x": curve.x,
            "y": curve.y,
            "residual_x": curve.residual_x,
            "residual_y": curve.residual_y,
            "hausdorff_to_axis": curve.hausdorff_to_axis,
        })
    _write_json(out / "cross.json", report)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="filippov",
        description="piecewise-smooth vector field analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="configuration file")
        p.add_argument("--out", default=".", help="output directory (default: current)")

    def with_grid(p):
        common(p)
        p.add_argument("--grid", help="surface grid lo:hi:count (overrides [run] grid)")

    with_grid(sub.add_parser("classify", help="classify surface points"))
    with_grid(sub.add_parser("certify", help="sliding/sewing certificates over a grid"))
    with_grid(sub.add_parser("slow-fast", help="blow-up plot data"))
    with_grid(sub.add_parser("manifold", help="track the sliding manifold"))
    p_int = sub.add_parser("integrate", help="integrate an orbit")
    common(p_int)
    p_int.add_argument("--from", dest="x0", help="initial state, comma separated")
    p_int.add_argument("--tspan", help="time window 'start,end'")
    p_int.add_argument("--mode", choices=("filippov", "regularized"))
    p_int.add_argument("--epsilon", type=float, help="band width for regularized mode")
    common(sub.add_parser("cross", help="stratified curve for a double switching"))
    with_grid(sub.add_parser("all", help="all artifacts the config supports"))
    return parser


def run_command(argv: Sequence[str]) -> int:
    """Entry point used by tests and by main(); returns the exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        cfg = load_config(args.config)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        grid = cfg.run.grid
        if getattr(args, "grid", None):
            from .config import _grid as parse_grid

            grid = parse_grid(args.grid, 0)

        if args.command == "classify":
            return _cmd_classify(cfg, out, grid)
        if args.command == "certify":
            return _cmd_certify(cfg, out, grid)
        if args.command == "slow-fast":
            return _cmd_slow_fast(cfg, out, grid)
        if args.command == "manifold":
            return _cmd_manifold(cfg, out, grid)
        if args.command == "cross":
            return _cmd_cross(cfg, out)
        if args.command == "integrate":
            x0 = cfg.run.x0
            if args.x0:
                x0 = tuple(float(v) for v in args.x0.split(","))
            t_span = cfg.run.t_span
            if args.tspan:
                parts = [float(v) for v in args.tspan.split(",")]
                if len(parts) != 2:
                    raise ConfigError("--tspan needs 'start,end'")
                t_span = (parts[0], parts[1])
            mode = args.mode or cfg.run.mode
            return _cmd_integrate(cfg, out, x0, t_span, mode, args.epsilon)
        if args.command == "all":
            rc = _cmd_classify(cfg, out, grid)
            rc = rc or _cmd_certify(cfg, out, grid)
            rc = rc or _cmd_slow_fast(cfg, out, grid)
            try:
                rc = rc or _cmd_manifold(cfg, out, grid)
            except NoSlidingAtError:
                pass  # nothing to track is fine for the combined run
            if cfg.run.x0 is not None:
                rc = rc or _cmd_integrate(
                    cfg, out, cfg.run.x0, cfg.run.t_span, cfg.run.mode, None
                )
            if cfg.cross is not None:
                rc = rc or _cmd_cross(cfg, out)
            return rc
        raise ConfigError(f"unknown command {args.command!r}")
    except (
        UnresolvedSingularityError,
        NoSlidingAtError,
        NotSlidingError,
        NonMonotoneTransitionError,
        DomainError,
    ) as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, ValidationFailure, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
