"""Numerical integration of smooth, regularized and hybrid dynamics.

Two steppers: classic fixed-step RK4 and an adaptive Dormand-Prince 5(4)
pair with PI step control.  Both record node derivatives, so trajectories
interpolate with cubic Hermite polynomials between accepted steps; event
location bisects on that interpolant.

The hybrid integrator follows one smooth field until the orbit reaches the
switching surface, classifies the hit, and either sews through, enters a
sliding segment driven by the Filippov combination, or stops on an
unresolvable singular hit.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .regularize import (
    DEFAULT_TRANSVERSALITY_TOL,
    HeightRoot,
    TransitionFunction,
    height_roots,
)
from .system import (
    DEFAULT_CLASS_TOL,
    PiecewiseSystem,
    SigmaClass,
    classify_point,
)

EVENT_TIME_TOL = 1e-12
DEFAULT_LAMBDA_TOL = 1e-10
# |y| below this counts as sitting on the surface; crossings are only
# recognized once the orbit clears the band, which keeps tangential exits
# from retriggering
SURFACE_BAND = 1e-12


class EventKind(enum.Enum):
    SIGMA_HIT = "SigmaHit"
    SLIDE_ENTRY = "SlideEntry"
    SLIDE_EXIT = "SlideExit"
    STEP_FAILURE = "StepFailure"


@dataclass(frozen=True)
class Event:
    time: float
    state: np.ndarray
    kind: EventKind


class UnresolvedSingularityError(Exception):
    """The orbit reached a singular surface point with no exit rule."""

    def __init__(self, time: float, state: np.ndarray, trajectory: "Trajectory"):
        self.time = time
        self.state = np.asarray(state, dtype=float)
        self.trajectory = trajectory
        super().__init__(
            f"singular surface point at t = {time}: state {self.state.tolist()}"
        )


class NoSlidingAtError(Exception):
    def __init__(self, x: float, reason: str):
        self.x = x
        self.reason = reason
        super().__init__(f"no certified sliding at x = {x}: {reason}")


@dataclass
class IntegratorOptions:
    method: str = "rk45"  # 'rk45' or 'rk4'
    abs_tol: float = 1e-9
    rel_tol: float = 1e-7
    max_step: float = math.inf  # for rk4 this is the fixed step
    min_step: float = 1e-13
    max_steps: int = 1_000_000
    class_tol: float = DEFAULT_CLASS_TOL
    lambda_tol: float = DEFAULT_LAMBDA_TOL
    max_events: int = 10_000


@dataclass
class Trajectory:
    """Accepted integration nodes plus node derivatives and events."""

    times: np.ndarray
    states: np.ndarray
    derivs: np.ndarray
    events: list[Event] = field(default_factory=list)

    @property
    def final_time(self) -> float:
        return float(self.times[-1])

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def sample(self, t: float) -> np.ndarray:
        """Cubic Hermite interpolation between the bracketing nodes.

        At event corners the stored node derivative is the left limit, so
        samples taken just past a corner smooth the kink over one interval.
        """
        ts = self.times
        if not ts[0] <= t <= ts[-1]:
            raise ValueError(f"t = {t} outside [{ts[0]}, {ts[-1]}]")
        k = int(np.searchsorted(ts, t, side="right") - 1)
        if k >= len(ts) - 1:
            return self.states[-1].copy()
        return _hermite(
            float(ts[k]), self.states[k], self.derivs[k],
            float(ts[k + 1]), self.states[k + 1], self.derivs[k + 1], t,
        )


def _hermite(t0, y0, f0, t1, y1, f1, t):
    h = t1 - t0
    if h == 0.0:
        return y0.copy()
    s = (t - t0) / h
    s2, s3 = s * s, s * s * s
    return (
        (2 * s3 - 3 * s2 + 1) * y0
        + (s3 - 2 * s2 + s) * h * f0
        + (-2 * s3 + 3 * s2) * y1
        + (s3 - s2) * h * f1
    )


# Dormand-Prince 5(4) tableau; the fifth-order solution is propagated and
# the embedded fourth-order result drives the error estimate
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


class _Recorder:
    def __init__(self, t0: float, y0: np.ndarray, f0: np.ndarray):
        self.times = [t0]
        self.states = [y0.copy()]
        self.derivs = [f0.copy()]

    def push(self, t, y, f):
        self.times.append(t)
        self.states.append(y.copy())
        self.derivs.append(f.copy())

    def build(self, events=None) -> Trajectory:
        return Trajectory(
            np.array(self.times),
            np.array(self.states),
            np.array(self.derivs),
            list(events or []),
        )


def _initial_step(f, t0, y0, f0, rel_tol, abs_tol, t_end):
    scale = abs_tol + rel_tol * np.abs(y0)
    d0 = float(np.sqrt(np.mean((y0 / scale) ** 2)))
    d1 = float(np.sqrt(np.mean((f0 / scale) ** 2)))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, abs(t_end - t0))
    if h0 == 0.0:
        return 0.0
    y1 = y0 + h0 * f0
    f1 = np.asarray(f(t0 + h0, y1), dtype=float)
    d2 = float(np.sqrt(np.mean(((f1 - f0) / scale) ** 2))) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, abs(t_end - t0))


def integrate(
    fn: Callable[[float, np.ndarray], np.ndarray],
    x0: Sequence[float],
    t_span: tuple[float, float],
    opts: IntegratorOptions | None = None,
    step_callback=None,
) -> Trajectory:
    """Integrate x' = fn(t, x) over t_span, forward in time.

    Returns the accepted steps; a StepFailure event ends the trajectory
    early if the adaptive controller underflows its minimum step.  The
    optional step_callback(recorder) may truncate integration by returning
    anything non-None after a step was recorded.
    """
    opts = opts or IntegratorOptions()
    t0, t_end = float(t_span[0]), float(t_span[1])
    if t_end < t0:
        raise ValueError(f"t_span must be increasing, got {t_span}")
    y = np.asarray(x0, dtype=float).copy()
    t = t0
    f0 = np.asarray(fn(t, y), dtype=float)
    rec = _Recorder(t, y, f0)
    events: list[Event] = []
    if t_end == t0:
        return rec.build(events)

    if opts.method == "rk4":
        h = opts.max_step if math.isfinite(opts.max_step) else (t_end - t0) / 100.0
        n = max(1, int(math.ceil((t_end - t0) / h - 1e-12)))
        h = (t_end - t0) / n
        for _ in range(n):
            k1 = np.asarray(fn(t, y), dtype=float)
            k2 = np.asarray(fn(t + h / 2, y + h / 2 * k1), dtype=float)
            k3 = np.asarray(fn(t + h / 2, y + h / 2 * k2), dtype=float)
            k4 = np.asarray(fn(t + h, y + h * k3), dtype=float)
            y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            t = t + h
            rec.push(t, y, np.asarray(fn(t, y), dtype=float))
            if step_callback is not None and step_callback(rec) is not None:
                break
        return rec.build(events)

    if opts.method != "rk45":
        raise ValueError(f"unknown method {opts.method!r}")

    fcur = f0
    h = min(_initial_step(fn, t, y, fcur, opts.rel_tol, opts.abs_tol, t_end), opts.max_step)
    err_prev = 1.0
    ks = np.empty((7, y.size))
    for _ in range(opts.max_steps):
        if t >= t_end:
            break
        h = min(h, t_end - t)
        if h < opts.min_step:
            events.append(Event(t, y.copy(), EventKind.STEP_FAILURE))
            break
        ks[0] = fcur
        for i in range(1, 7):
            yi = y + h * (ks[:i].T @ _DP_A[i])
            ks[i] = fn(t + _DP_C[i] * h, yi)
        y5 = y + h * (ks.T @ _DP_B5)
        y4 = y + h * (ks.T @ _DP_B4)
        scale = opts.abs_tol + opts.rel_tol * np.maximum(np.abs(y), np.abs(y5))
        err = float(np.sqrt(np.mean(((y5 - y4) / scale) ** 2)))
        if err <= 1.0:
            t = t + h
            y = y5
            fcur = ks[6].copy()  # FSAL
            rec.push(t, y, fcur)
            if step_callback is not None and step_callback(rec) is not None:
                break
            # PI controller, conservative enough that the propagated
            # fifth-order solution stays well inside the tolerances
            factor = 0.9 * (err + 1e-16) ** -0.14 * (err_prev + 1e-16) ** 0.08
            err_prev = err
            h = min(h * min(5.0, max(0.2, factor)), opts.max_step)
        else:
            h *= max(0.2, 0.9 * err ** -0.2)
    return rec.build(events)


# ---------------------------------------------------------------------------
# hybrid (Filippov) integration

def _weights_on_sigma(system: PiecewiseSystem, x: np.ndarray) -> float | None:
    """Filippov weight lam = a_minus / (a_minus - a_plus), None if undefined."""
    a_plus, a_minus = system.normal_components_on_sigma(x)
    denom = a_minus - a_plus
    if denom == 0.0:
        return None
    return a_minus / denom


def _sliding_velocity(system: PiecewiseSystem, x: np.ndarray) -> np.ndarray | None:
    """Tangential part of the Filippov combination, bypassing the class gate.

    The sliding integrator keeps using this while the weight drifts toward
    its boundary, where classify_point would already call the point
    singular.
    """
    lam = _weights_on_sigma(system, x)
    if lam is None:
        return None
    point = np.append(x, 0.0)
    v = lam * system.plus.evaluate(point) + (1.0 - lam) * system.minus.evaluate(point)
    return v[:-1]


def _bisect_time(fval: Callable[[float], float], ta: float, tb: float, target: float) -> float:
    fa = fval(ta) - target
    while tb - ta > EVENT_TIME_TOL:
        tm = 0.5 * (ta + tb)
        fm = fval(tm) - target
        if fm == 0.0:
            return tm
        if fa * fm < 0.0:
            tb = tm
        else:
            ta, fa = tm, fm
    return 0.5 * (ta + tb)


class _Pieces:
    def __init__(self, dim: int):
        self.dim = dim
        self.times: list[np.ndarray] = []
        self.states: list[np.ndarray] = []
        self.derivs: list[np.ndarray] = []
        self.events: list[Event] = []

    def extend(self, traj: Trajectory, upto: int | None = None) -> None:
        sl = slice(None, upto)
        times = traj.times[sl]
        if times.size and self.times and self.times[-1].size:
            if times[0] == self.times[-1][-1]:  # duplicated junction node
                sl = slice(1, upto)
                times = traj.times[sl]
        self.times.append(times)
        self.states.append(traj.states[sl])
        self.derivs.append(traj.derivs[sl])

    def add_node(self, t: float, state: np.ndarray, deriv: np.ndarray) -> None:
        self.times.append(np.array([t]))
        self.states.append(np.asarray(state, dtype=float)[None, :].copy())
        self.derivs.append(np.asarray(deriv, dtype=float)[None, :].copy())

    def build(self) -> Trajectory:
        if not self.times:
            empty = np.zeros((0, self.dim))
            return Trajectory(np.zeros(0), empty, empty.copy(), self.events)
        return Trajectory(
            np.concatenate(self.times),
            np.concatenate(self.states),
            np.concatenate(self.derivs),
            self.events,
        )


def integrate_filippov(
    system: PiecewiseSystem,
    x0: Sequence[float],
    t_span: tuple[float, float],
    opts: IntegratorOptions | None = None,
) -> Trajectory:
    """Hybrid orbit of the piecewise system with event bookkeeping.

    Surface hits are located by bisection on the dense interpolant to 1e-12
    in time and recorded as SigmaHit.  Sliding hits enter the Filippov
    combination (SlideEntry) and leave it (SlideExit) along the field whose
    weight reached its boundary; orbits that merely sew continue on the
    other side.  Singular hits append a terminal event and raise
    UnresolvedSingularityError carrying the partial trajectory.
    """
    opts = opts or IntegratorOptions()
    state = np.asarray(x0, dtype=float).copy()
    t = float(t_span[0])
    t_end = float(t_span[1])
    n = system.dim
    if len(state) != n:
        raise ValueError(f"state dimension {len(state)} does not match system dimension {n}")
    pieces = _Pieces(n)

    def finish() -> Trajectory:
        if not pieces.times:
            pieces.add_node(t, state, np.zeros(n))
        return pieces.build()

    def fail_singular(time: float, st: np.ndarray):
        pieces.events.append(Event(time, st.copy(), EventKind.STEP_FAILURE))
        raise UnresolvedSingularityError(time, st, finish())

    forced_region: int | None = None
    guard = 0
    while t < t_end - EVENT_TIME_TOL:
        guard += 1
        if guard > opts.max_events:
            pieces.events.append(Event(t, state.copy(), EventKind.STEP_FAILURE))
            break

        y = state[-1]
        if forced_region is not None:
            region = forced_region
            forced_region = None
        elif abs(y) <= SURFACE_BAND:
            verdict = classify_point(system, state[:-1], opts.class_tol)
            if verdict == SigmaClass.SLIDING:
                pieces.events.append(Event(t, state.copy(), EventKind.SLIDE_ENTRY))
                t, state, exit_region = _slide(system, state, t, t_end, opts, pieces)
                if exit_region is None:
                    break  # reached t_end (or failed) while sliding
                forced_region = exit_region
                continue
            if verdict == SigmaClass.SIGMA_SINGULAR:
                fail_singular(t, state)
            a_plus, _ = system.normal_components_on_sigma(state[:-1])
            region = 1 if a_plus > 0 else -1
        else:
            region = 1 if y > 0 else -1

        field_def = system.plus if region > 0 else system.minus
        fn = lambda tt, s, fd=field_def: fd.evaluate(s)
        crossing: dict = {}

        def watch(rec: _Recorder, region=region, crossing=crossing):
            y_new = rec.states[-1][-1]
            if y_new * region < 0 and abs(y_new) > SURFACE_BAND:
                crossing["index"] = len(rec.times) - 1
                return True
            return None

        seg = integrate(fn, state, (t, t_end), opts, step_callback=watch)

        if "index" not in crossing:
            pieces.extend(seg)
            pieces.events.extend(seg.events)
            t = seg.final_time
            state = seg.final_state.copy()
            if seg.events and seg.events[-1].kind == EventKind.STEP_FAILURE:
                break
            continue

        k = crossing["index"]
        ta, tb = float(seg.times[k - 1]), float(seg.times[k])
        target = 0.0
        if abs(seg.states[k - 1][-1]) <= SURFACE_BAND:
            # launched from the surface; cut where the orbit clears the band
            target = -region * SURFACE_BAND / 2.0
        t_hit = _bisect_time(lambda tt: float(seg.sample(tt)[-1]), ta, tb, target)
        hit_state = seg.sample(t_hit)
        hit_state[-1] = 0.0
        pieces.extend(seg, upto=k)
        pieces.add_node(t_hit, hit_state, fn(t_hit, hit_state))
        pieces.events.append(Event(t_hit, hit_state.copy(), EventKind.SIGMA_HIT))

        verdict = classify_point(system, hit_state[:-1], opts.class_tol)
        t, state = t_hit, hit_state
        if verdict == SigmaClass.SIGMA_SINGULAR:
            fail_singular(t_hit, hit_state)
        # Sliding: the loop re-enters through the surface branch above.
        # Sewing: the surface branch picks the receiving side from a_plus.

    return finish()


def _slide(system, state, t, t_end, opts, pieces):
    """Integrate the sliding flow from a surface state.

    Returns (t, state, exit_region): exit_region is +1/-1 when the weight
    boundary was reached and the orbit leaves along that field, else None.
    """
    lam_tol = opts.lambda_tol

    def lam_of(x: np.ndarray) -> float:
        lam = _weights_on_sigma(system, x)
        if lam is None:
            pieces.events.append(Event(t, np.append(x, 0.0), EventKind.STEP_FAILURE))
            raise UnresolvedSingularityError(t, np.append(x, 0.0), pieces.build())
        return lam

    def fn(tt: float, x: np.ndarray) -> np.ndarray:
        v = _sliding_velocity(system, x)
        if v is None:
            pieces.events.append(Event(tt, np.append(x, 0.0), EventKind.STEP_FAILURE))
            raise UnresolvedSingularityError(tt, np.append(x, 0.0), pieces.build())
        return v

    lam0 = lam_of(state[:-1])
    if not lam_tol < lam0 < 1.0 - lam_tol:
        boundary = 1 if lam0 >= 0.5 else -1
        return _slide_exit(system, state, t, boundary, pieces)

    hit: dict = {}

    def watch(rec: _Recorder):
        lam = lam_of(rec.states[-1])
        if lam >= 1.0 - lam_tol:
            hit["region"] = 1
            hit["index"] = len(rec.times) - 1
            return True
        if lam <= lam_tol:
            hit["region"] = -1
            hit["index"] = len(rec.times) - 1
            return True
        return None

    seg = integrate(fn, state[:-1], (t, t_end), opts, step_callback=watch)

    def lift_into_pieces(upto=None):
        sl = slice(None, upto)
        times = seg.times[sl]
        states = np.hstack([seg.states[sl], np.zeros((len(times), 1))])
        derivs = np.hstack([seg.derivs[sl], np.zeros((len(times), 1))])
        pieces.extend(Trajectory(times, states, derivs, []))

    if "index" not in hit:
        lift_into_pieces()
        for ev in seg.events:
            pieces.events.append(Event(ev.time, np.append(ev.state, 0.0), ev.kind))
        return seg.final_time, np.append(seg.final_state, 0.0), None

    k = hit["index"]
    exit_region = hit["region"]
    ta, tb = float(seg.times[k - 1]), float(seg.times[k])
    target = 1.0 - lam_tol if exit_region > 0 else lam_tol
    t_exit = _bisect_time(lambda tt: lam_of(seg.sample(tt)), ta, tb, target)
    x_exit = seg.sample(t_exit)
    lift_into_pieces(upto=k)
    return _slide_exit(system, np.append(x_exit, 0.0), t_exit, exit_region, pieces)


def _slide_exit(system, state, t, exit_region, pieces):
    deriv = (system.plus if exit_region > 0 else system.minus).evaluate(state)
    pieces.add_node(t, state, deriv)
    pieces.events.append(Event(t, state.copy(), EventKind.SLIDE_EXIT))
    return t, state.copy(), exit_region


# ---------------------------------------------------------------------------
# invariant manifold tracking and measurements

@dataclass(frozen=True)
class ManifoldPoint:
    x: float
    t: float
    y: float
    dh_dt: float


@dataclass(frozen=True)
class ManifoldTrack:
    """Sampled invariant manifold {(x, eps * t_x)} with exclusions."""

    eps: float
    points: tuple[ManifoldPoint, ...]
    excluded: tuple[tuple[float, str], ...]

    def as_array(self) -> np.ndarray:
        return np.array([[p.x, p.y] for p in self.points])


def track_manifold(
    system: PiecewiseSystem,
    transition: TransitionFunction,
    eps: float,
    x_grid: Sequence[float],
    transversality_tol: float = DEFAULT_TRANSVERSALITY_TOL,
) -> ManifoldTrack:
    """Locate the sliding manifold over a grid of surface points.

    For each x the transversal root t_x of the height function places the
    manifold point (x, eps * t_x); with several transversal roots the most
    transversal one is tracked.  Grid points without a transversal root are
    excluded with a reason; if the whole grid fails, NoSlidingAtError is
    raised for the first point.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    points: list[ManifoldPoint] = []
    excluded: list[tuple[float, str]] = []
    for x in x_grid:
        x = float(x)
        found = height_roots(system, transition, x)
        roots = [r for r in found if isinstance(r, HeightRoot)]
        transversal = [r for r in roots if abs(r.dh_dt) > transversality_tol]
        if not transversal:
            if any(not isinstance(r, HeightRoot) for r in found):
                excluded.append((x, "height function degenerates"))
            elif roots:
                excluded.append((x, "only tangential roots"))
            else:
                excluded.append((x, "no root: not a sliding point"))
            continue
        best = max(transversal, key=lambda r: abs(r.dh_dt))
        points.append(ManifoldPoint(x, best.t, eps * best.t, best.dh_dt))
    if not points:
        x0, reason = excluded[0]
        raise NoSlidingAtError(x0, reason)
    return ManifoldTrack(eps, tuple(points), tuple(excluded))


def hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    """Hausdorff distance between finite point sets (rows are points)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if b.ndim == 1:
        b = b[:, None]
    if a.size == 0 or b.size == 0:
        raise ValueError("hausdorff distance of an empty set is undefined")
    d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


@dataclass(frozen=True)
class Equilibrium:
    x: float
    stability: int  # -1 stable, +1 unstable, 0 degenerate


def equilibria_on_manifold(
    system: PiecewiseSystem,
    transition: TransitionFunction,
    eps: float,
    x_range: tuple[float, float],
    samples: int = 601,
    eq_tol: float = 1e-9,
    transversality_tol: float = DEFAULT_TRANSVERSALITY_TOL,
) -> list[Equilibrium]:
    """Equilibria of the flow restricted to the sliding manifold (planar case).

    The restricted velocity g(x) is the tangential component of the
    regularized field evaluated on the manifold point (x, eps * t_x).
    Simple zeros come from sign changes refined by bisection; tangential
    zeros (no sign change) are caught at critical points of g where |g|
    falls below ``eq_tol``.  Stability is the sign of g' there.
    """
    if system.dim != 2:
        raise ValueError("equilibria tracking is implemented for planar systems only")
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    lo, hi = float(x_range[0]), float(x_range[1])

    def manifold_t(x: float) -> float | None:
        found = height_roots(system, transition, x)
        roots = [
            r for r in found
            if isinstance(r, HeightRoot) and abs(r.dh_dt) > transversality_tol
        ]
        if not roots:
            return None
        return max(roots, key=lambda r: abs(r.dh_dt)).t

    def g(x: float) -> float:
        tx = manifold_t(x)
        if tx is None:
            return math.nan
        psi = transition.value(tx, (x,))
        point = np.array([x, eps * tx])
        b_plus = system.plus.evaluate(point)[0]
        b_minus = system.minus.evaluate(point)[0]
        return 0.5 * ((1.0 + psi) * b_plus + (1.0 - psi) * b_minus)

    xs = np.linspace(lo, hi, samples)
    gs = np.array([g(float(x)) for x in xs])

    def refine_zero(a: float, b: float, fa: float) -> float:
        while b - a > 1e-12:
            mid = 0.5 * (a + b)
            fm = g(mid)
            if math.isnan(fm) or fm == 0.0:
                return mid
            if fa * fm < 0.0:
                b = mid
            else:
                a, fa = mid, fm
        return 0.5 * (a + b)

    delta = (hi - lo) / (samples - 1) / 2.0

    def secant_slope(x: float) -> float:
        return g(min(x + delta, hi)) - g(max(x - delta, lo))

    def stability_of(x: float) -> int:
        d = secant_slope(x) / (2.0 * delta)
        if abs(d) <= 1e-6:
            return 0
        return 1 if d > 0 else -1

    found: list[Equilibrium] = []

    for k in range(samples - 1):
        fa, fb = gs[k], gs[k + 1]
        if math.isnan(fa) or math.isnan(fb) or fa == 0.0:
            continue
        if fa * fb < 0.0:
            x_star = refine_zero(float(xs[k]), float(xs[k + 1]), float(fa))
            found.append(Equilibrium(x_star, stability_of(x_star)))
    for k in range(samples):
        if gs[k] == 0.0:
            found.append(Equilibrium(float(xs[k]), stability_of(float(xs[k]))))

    # tangential zeros: bisect the secant slope to its sign change and keep
    # the critical point if g is small enough there
    ds = np.array([secant_slope(float(x)) for x in xs])
    for k in range(samples - 1):
        da, db = ds[k], ds[k + 1]
        if math.isnan(da) or math.isnan(db) or da * db >= 0.0:
            continue
        a, b, fa = float(xs[k]), float(xs[k + 1]), float(da)
        while b - a > 1e-12:
            mid = 0.5 * (a + b)
            fm = secant_slope(mid)
            if fm == 0.0:
                a = b = mid
                break
            if fa * fm < 0.0:
                b = mid
            else:
                a, fa = mid, fm
        x_c = 0.5 * (a + b)
        val = g(x_c)
        if not math.isnan(val) and abs(val) <= eq_tol:
            if not any(abs(e.x - x_c) < 1e-7 for e in found):
                found.append(Equilibrium(x_c, stability_of(x_c)))

    found.sort(key=lambda e: e.x)
    deduped: list[Equilibrium] = []
    for e in found:
        if not deduped or e.x - deduped[-1].x > 1e-7:
            deduped.append(e)
    return deduped
