"""Line-oriented configuration files for the command line tool.

Format: ``key = value`` lines grouped under ``[section]`` headers, with
``#`` comments and blank lines ignored.  Sections: ``[system]`` (required
unless ``[cross]`` is present), ``[transition]``, ``[run]``, ``[cross]``.

Example::

    [system]
    coords = x, y
    sigma = y
    x_plus = 1, (x+1)+(x-1)
    x_minus = 1, (x+1)-(x-1)

    [transition]
    kind = overshoot
    m = 2

    [run]
    grid = -1:1:201
    epsilons = 0.1, 0.05, 0.025

A surface given as ``y - g(x)`` is normalized away at load time: the load
rewrites the fields into the adapted chart where the surface is the zero
set of the last coordinate.  That change of variables substitutes
y <- y + g(x) into every component and corrects the normal component by
the drift of g, so downstream code only ever sees the flat surface.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from . import expr as ex
from .cross import CROSS_COORDS, CrossSystem
from .regularize import TransitionFunction, ValidationFailure, make_transition
from .system import PiecewiseSystem, VectorFieldDef


class ConfigError(Exception):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")


@dataclass
class RunParams:
    grid: tuple[float, float, int] = (-1.0, 1.0, 201)
    ybar_grid: tuple[float, float, int] = (-1.0, 1.0, 41)
    epsilons: tuple[float, ...] = (0.1,)
    etas: tuple[float, ...] = ()
    t_span: tuple[float, float] = (0.0, 1.0)
    x0: tuple[float, ...] | None = None
    mode: str = "filippov"
    class_tol: float = 1e-9
    transversality_tol: float = 1e-8
    zero_tol: float = 1e-10
    lambda_tol: float = 1e-10
    abs_tol: float = 1e-9
    rel_tol: float = 1e-7
    max_step: float = float("inf")
    seed: int = 0


@dataclass
class SystemConfig:
    system: PiecewiseSystem | None
    transition: TransitionFunction
    cross: CrossSystem | None
    run: RunParams
    sha256: str
    source: str = dc_field(repr=False, default="")


def _parse_sections(text: str) -> dict[str, dict[str, tuple[str, int]]]:
    sections: dict[str, dict[str, tuple[str, int]]] = {}
    current: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip().lower()
            if current not in ("system", "transition", "run", "cross"):
                raise ConfigError(f"unknown section [{current}]", lineno)
            sections.setdefault(current, {})
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno)
        if current is None:
            raise ConfigError("key outside of any [section]", lineno)
        key, _, value = line.partition("=")
        key = key.strip().lower()
        if key in sections[current]:
            raise ConfigError(f"duplicate key {key!r} in [{current}]", lineno)
        sections[current][key] = (value.strip(), lineno)
    return sections


def _floats(value: str, lineno: int) -> tuple[float, ...]:
    try:
        return tuple(float(v.strip()) for v in value.split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated numbers, got {value!r}", lineno) from exc


def _grid(value: str, lineno: int) -> tuple[float, float, int]:
    parts = value.split(":")
    if len(parts) != 3:
        raise ConfigError(f"expected grid as lo:hi:count, got {value!r}", lineno)
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"expected grid as lo:hi:count, got {value!r}", lineno) from exc
    if count < 2 or hi <= lo:
        raise ConfigError(f"grid needs hi > lo and count >= 2, got {value!r}", lineno)
    return lo, hi, count


def _parse_expr(text: str, lineno: int, what: str) -> ex.Expr:
    try:
        return ex.parse(text)
    except ex.ParseError as exc:
        raise ConfigError(f"{what}: {exc}", lineno) from exc


def _components(value: str, lineno: int, what: str, count: int) -> tuple[ex.Expr, ...]:
    parts = [p.strip() for p in value.split(",")]
    if len(parts) != count:
        raise ConfigError(f"{what} needs {count} comma-separated components, got {len(parts)}", lineno)
    return tuple(_parse_expr(p, lineno, what) for p in parts)


def _normalize_surface(
    coords: tuple[str, ...], sigma_text: str, lineno: int,
    components: tuple[ex.Expr, ...],
) -> tuple[ex.Expr, ...]:
    """Rewrite components into the chart where the surface is {y = 0}.

    Accepts the bare normal coordinate or ``y - g(x)`` with g free of y.
    The new normal velocity is a - sum_i dg/dx_i * b_i, everything
    expressed through the shifted y.
    """
    y = coords[-1]
    sigma = _parse_expr(sigma_text, lineno, "sigma")
    if sigma == ex.Var(y):
        return components
    if not (isinstance(sigma, ex.Binary) and sigma.op == "-" and sigma.left == ex.Var(y)):
        raise ConfigError(
            f"sigma must be {y!r} or '{y} - g(...)' in the tangential coordinates", lineno
        )
    g = sigma.right
    extra = ex.free_vars(g) - set(coords[:-1])
    if extra:
        raise ConfigError(f"sigma offset may not involve {sorted(extra)}", lineno)
    shift = {y: ex.add(ex.Var(y), g)}
    shifted = tuple(ex.substitute(c, shift) for c in components)
    normal = shifted[-1]
    for name, comp in zip(coords[:-1], shifted[:-1]):
        normal = ex.sub(normal, ex.mul(ex.differentiate(g, name), comp))
    return shifted[:-1] + (normal,)


def _build_system(sec: dict[str, tuple[str, int]]) -> PiecewiseSystem:
    if "coords" not in sec:
        raise ConfigError("[system] is missing 'coords'")
    coords_text, lineno = sec["coords"]
    coords = tuple(c.strip() for c in coords_text.split(",") if c.strip())
    if len(coords) < 2:
        raise ConfigError("need at least two coordinates", lineno)
    if "dim" in sec:
        dim_text, dim_line = sec["dim"]
        if int(dim_text) != len(coords):
            raise ConfigError(
                f"dim = {dim_text} disagrees with {len(coords)} coordinates", dim_line
            )
    fields = {}
    for key in ("x_plus", "x_minus"):
        if key not in sec:
            raise ConfigError(f"[system] is missing {key!r}")
        value, vline = sec[key]
        comps = _components(value, vline, key, len(coords))
        sigma_text, sline = sec.get("sigma", (coords[-1], 0))
        comps = _normalize_surface(coords, sigma_text, sline, comps)
        try:
            fields[key] = VectorFieldDef(coords, comps)
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}", vline) from exc
    try:
        return PiecewiseSystem(fields["x_plus"], fields["x_minus"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _build_transition(sec: dict[str, tuple[str, int]], x_names: tuple[str, ...]) -> TransitionFunction:
    kind, lineno = sec.get("kind", ("smoothstep", 0))
    params: dict = {}
    if kind == "overshoot":
        if "m" not in sec:
            raise ConfigError("overshoot transition needs 'm'", lineno)
        params["m"] = float(sec["m"][0])
    elif kind == "biased":
        if "t0" not in sec:
            raise ConfigError("biased transition needs 't0'", lineno)
        params["t0"] = float(sec["t0"][0])
    elif kind == "custom":
        if "expr" not in sec:
            raise ConfigError("custom transition needs 'expr'", lineno)
        params["expression"] = _parse_expr(sec["expr"][0], sec["expr"][1], "transition expr")
        params["x_names"] = x_names
    elif kind != "smoothstep":
        raise ConfigError(f"unknown transition kind {kind!r}", lineno)
    try:
        return make_transition(kind, **params)
    except ValidationFailure as exc:
        raise ConfigError(f"transition: {exc}", lineno) from exc


def _build_cross(sec: dict[str, tuple[str, int]]) -> CrossSystem:
    keys = {"x_pp": (1, 1), "x_pm": (1, -1), "x_mp": (-1, 1), "x_mm": (-1, -1)}
    fields = {}
    for key, signs in keys.items():
        if key not in sec:
            raise ConfigError(f"[cross] is missing {key!r}")
        value, lineno = sec[key]
        comps = _components(value, lineno, key, 3)
        try:
            fields[signs] = VectorFieldDef(CROSS_COORDS, comps)
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}", lineno) from exc

    def transition_for(prefix: str) -> TransitionFunction:
        kind, lineno = sec.get(f"{prefix}_kind", ("smoothstep", 0))
        params: dict = {}
        if kind == "overshoot":
            if f"{prefix}_m" not in sec:
                raise ConfigError(f"{prefix} transition needs '{prefix}_m'", lineno)
            params["m"] = float(sec[f"{prefix}_m"][0])
        elif kind == "biased":
            if f"{prefix}_t0" not in sec:
                raise ConfigError(f"{prefix} transition needs '{prefix}_t0'", lineno)
            params["t0"] = float(sec[f"{prefix}_t0"][0])
        elif kind == "custom":
            if f"{prefix}_expr" not in sec:
                raise ConfigError(f"{prefix} transition needs '{prefix}_expr'", lineno)
            params["expression"] = _parse_expr(
                sec[f"{prefix}_expr"][0], sec[f"{prefix}_expr"][1], f"{prefix} expr"
            )
        elif kind != "smoothstep":
            raise ConfigError(f"unknown transition kind {kind!r}", lineno)
        try:
            return make_transition(kind, **params)
        except ValidationFailure as exc:
            raise ConfigError(f"{prefix} transition: {exc}", lineno) from exc

    return CrossSystem(fields=fields, phi=transition_for("phi"), psi=transition_for("psi"))


def _build_run(sec: dict[str, tuple[str, int]]) -> RunParams:
    run = RunParams()
    for key, (value, lineno) in sec.items():
        if key == "grid":
            run.grid = _grid(value, lineno)
        elif key == "ybar_grid":
            run.ybar_grid = _grid(value, lineno)
        elif key == "epsilons":
            run.epsilons = _floats(value, lineno)
            if any(e <= 0 for e in run.epsilons):
                raise ConfigError("epsilons must be positive", lineno)
        elif key == "etas":
            run.etas = _floats(value, lineno)
            if any(e <= 0 for e in run.etas):
                raise ConfigError("etas must be positive", lineno)
        elif key == "t_span":
            vals = _floats(value, lineno)
            if len(vals) != 2 or vals[1] <= vals[0]:
                raise ConfigError(f"t_span needs 'start, end' with end > start, got {value!r}", lineno)
            run.t_span = (vals[0], vals[1])
        elif key == "x0":
            run.x0 = _floats(value, lineno)
        elif key == "mode":
            if value not in ("filippov", "regularized"):
                raise ConfigError(f"mode must be 'filippov' or 'regularized', got {value!r}", lineno)
            run.mode = value
        elif key in ("class_tol", "transversality_tol", "zero_tol", "lambda_tol",
                     "abs_tol", "rel_tol", "max_step"):
            try:
                setattr(run, key, float(value))
            except ValueError as exc:
                raise ConfigError(f"{key} must be a number, got {value!r}", lineno) from exc
        elif key == "seed":
            try:
                run.seed = int(value)
            except ValueError as exc:
                raise ConfigError(f"seed must be an integer, got {value!r}", lineno) from exc
        else:
            raise ConfigError(f"unknown [run] key {key!r}", lineno)
    return run


def load_config(path: str | Path) -> SystemConfig:
    """Parse and validate a configuration file.

    Raises ConfigError with the offending line number on any problem.
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    text = data.decode("utf-8", errors="replace")
    sections = _parse_sections(text)

    system = _build_system(sections["system"]) if "system" in sections else None
    cross = _build_cross(sections["cross"]) if "cross" in sections else None
    if system is None and cross is None:
        raise ConfigError("config needs a [system] or [cross] section")
    x_names = system.x_names if system is not None else ()
    transition = _build_transition(sections.get("transition", {}), x_names)
    run = _build_run(sections.get("run", {}))
    if system is not None and run.x0 is not None and len(run.x0) != system.dim:
        raise ConfigError(f"x0 needs {system.dim} components, got {len(run.x0)}")
    return SystemConfig(
        system=system,
        transition=transition,
        cross=cross,
        run=run,
        sha256=hashlib.sha256(data).hexdigest(),
        source=text,
    )


def grid_points(grid: tuple[float, float, int]) -> np.ndarray:
    lo, hi, count = grid
    return np.linspace(lo, hi, count)
