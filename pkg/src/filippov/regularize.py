"""Transition-type regularization and sliding/sewing certificates.

A transition function psi(x, t) equals -1 for t <= -1 and +1 for t >= 1.
Feeding it t = y/eps blends the two halves of a piecewise system into one
smooth field

    X_eps = (1 + psi)/2 * X_plus + (1 - psi)/2 * X_minus,

which agrees with X_plus above the band |y| < eps and with X_minus below it.

Whether the band traps orbits is decided by the height function

    h(x, t) = psi(x, t) * (a_plus - a_minus) + (a_plus + a_minus),

with a_pm the normal field components frozen on the surface.  A transversal
zero in t certifies a sliding band, absence of zeros with |h| bounded away
from zero certifies sewing, and everything else stays indeterminate.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import expr as ex
from .system import PiecewiseSystem

DEFAULT_TRANSVERSALITY_TOL = 1e-8
DEFAULT_ZERO_TOL = 1e-10
DEFAULT_GRID_CELLS = 512
ROOT_BISECTION_TOL = 1e-12

_VALIDATION_T = (-1.0, -1.5, -10.0, 1.0, 1.5, 10.0)
_VALIDATION_X = (-1.0, -0.37, 0.0, 0.58, 1.0)


class ValidationFailure(Exception):
    """A transition function violates one of its defining constraints."""


def _clamp(t: float) -> float:
    return -1.0 if t < -1.0 else (1.0 if t > 1.0 else t)


def _cubic(t: float) -> float:
    return (3.0 * t - t ** 3) / 2.0


def _cubic_d(t: float) -> float:
    return (3.0 - 3.0 * t * t) / 2.0


class TransitionFunction:
    """Base class; concrete kinds implement value/deriv on the core interval."""

    def value(self, t: float, x: Sequence[float] = ()) -> float:
        if t < -1.0:
            return -1.0
        if t > 1.0:
            return 1.0
        return self._core(t, x)  # cores reach -1/+1 at the band edge

    def deriv_t(self, t: float, x: Sequence[float] = ()) -> float:
        if t <= -1.0 or t >= 1.0:
            return 0.0
        return self._core_d(t, x)

    def _core(self, t: float, x: Sequence[float]) -> float:
        raise NotImplementedError

    def _core_d(self, t: float, x: Sequence[float]) -> float:
        raise NotImplementedError


@dataclass
class Smoothstep(TransitionFunction):
    """Clamped cubic (3t - t^3)/2; odd, strictly increasing, zero at 0."""

    def _core(self, t, x):
        return _cubic(t)

    def _core_d(self, t, x):
        return _cubic_d(t)


@dataclass
class Overshoot(TransitionFunction):
    """Cubic plus a calibrated bump c*(1-t^2)^2 whose interior max is ``m``.

    The bump keeps the boundary values and C1 matching intact; c is found by
    bisection against a numerically maximized interior value, so the peak
    equals m to within 1e-8.  Not monotone: that is the point.
    """

    m: float
    c: float = 0.0

    def __post_init__(self):
        if not self.m > 1.0:
            raise ValidationFailure(f"overshoot max must exceed 1, got {self.m}")
        if self.c == 0.0:
            self.c = _calibrate_overshoot(self.m)

    def _core(self, t, x):
        s = 1.0 - t * t
        return _cubic(t) + self.c * s * s

    def _core_d(self, t, x):
        s = 1.0 - t * t
        return _cubic_d(t) - 4.0 * self.c * t * s


def _interior_max(f, lo: float = -1.0, hi: float = 1.0, samples: int = 2001) -> float:
    """Maximum of f on [lo, hi]: coarse scan, then golden-section refinement."""
    ts = np.linspace(lo, hi, samples)
    vals = np.array([f(t) for t in ts])
    k = int(np.argmax(vals))
    a = ts[max(k - 1, 0)]
    b = ts[min(k + 1, samples - 1)]
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > 1e-14:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = f(d)
    return max(vals[k], fc, fd)


def _calibrate_overshoot(m: float) -> float:
    def peak(c: float) -> float:
        return _interior_max(lambda t: _cubic(t) + c * (1.0 - t * t) ** 2)

    lo = 0.0
    hi = 1.0
    while peak(hi) < m:
        hi *= 2.0
        if hi > 1e6:
            raise ValidationFailure(f"cannot reach overshoot max {m}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if peak(mid) < m:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-13:
            break
    c = 0.5 * (lo + hi)
    if abs(peak(c) - m) > 1e-9:
        raise ValidationFailure(f"overshoot calibration missed: peak {peak(c)} for target {m}")
    return c


@dataclass
class Biased(TransitionFunction):
    """Monotone transition whose unique zero sits at t0 in (-1, 1).

    Composes the cubic with the Moebius reparametrization
    w(t) = (t - t0)/(1 - t0*t), which fixes the endpoints, maps t0 to 0 and
    is strictly increasing on the interval.
    """

    t0: float

    def __post_init__(self):
        if not -1.0 < self.t0 < 1.0:
            raise ValidationFailure(f"bias point must lie in (-1, 1), got {self.t0}")

    def _w(self, t: float) -> float:
        return (t - self.t0) / (1.0 - self.t0 * t)

    def _core(self, t, x):
        return _cubic(self._w(t))

    def _core_d(self, t, x):
        w = self._w(t)
        dw = (1.0 - self.t0 * self.t0) / (1.0 - self.t0 * t) ** 2
        return _cubic_d(w) * dw


@dataclass
class Custom(TransitionFunction):
    """Transition given by an expression in (x_1, ..., x_{n-1}, t).

    The expression is evaluated with t clamped to [-1, 1], which forces
    constancy outside the band; the boundary values are checked at
    construction.  The t-derivative is the symbolic derivative inside the
    band and 0 outside.
    """

    expression: ex.Expr
    x_names: tuple[str, ...] = ()

    def __post_init__(self):
        if isinstance(self.expression, str):
            self.expression = ex.parse(self.expression)
        extra = ex.free_vars(self.expression) - set(self.x_names) - {"t"}
        if extra:
            raise ValidationFailure(
                f"custom transition uses unknown variables {sorted(extra)}"
            )
        self._deriv = ex.differentiate(self.expression, "t")

    def _bindings(self, t: float, x: Sequence[float]) -> ex.Bindings:
        b: ex.Bindings = {"t": _clamp(t)}
        for name, v in zip(self.x_names, x):
            b[name] = float(v)
        return b

    def _core(self, t, x):
        return ex.evaluate(self.expression, self._bindings(t, x))

    def _core_d(self, t, x):
        return ex.evaluate(self._deriv, self._bindings(t, x))


def _validate(tf: TransitionFunction, x_names: Sequence[str] = ()) -> None:
    if x_names:
        grids = [_VALIDATION_X] * len(x_names)
        samples = list(np.stack(np.meshgrid(*grids), axis=-1).reshape(-1, len(x_names)))
    else:
        samples = [()]
    for x in samples:
        for t in _VALIDATION_T:
            want = -1.0 if t < 0 else 1.0
            got = tf.value(t, x)
            if abs(got - want) > 1e-12:
                raise ValidationFailure(
                    f"boundary value violated: psi({t}) = {got} at x = {tuple(x)}, expected {want}"
                )
        if isinstance(tf, (Smoothstep, Biased)):
            for t in np.linspace(-0.999, 0.999, 101):
                if tf.deriv_t(float(t), x) <= 0.0:
                    raise ValidationFailure(f"monotone transition has nonpositive slope at t = {t}")
    if isinstance(tf, Overshoot):
        peak = _interior_max(lambda t: tf.value(t))
        if abs(peak - tf.m) > 1e-8:
            raise ValidationFailure(f"interior max {peak} differs from target {tf.m}")


def make_transition(kind: str, **params) -> TransitionFunction:
    """Build and validate a transition function.

    Kinds: ``smoothstep``; ``overshoot`` with ``m`` > 1; ``biased`` with
    ``t0`` in (-1, 1); ``custom`` with ``expression`` (text or tree) and
    optional ``x_names``.
    """
    kind = kind.lower()
    if kind == "smoothstep":
        tf: TransitionFunction = Smoothstep()
    elif kind == "overshoot":
        tf = Overshoot(m=float(params.pop("m")))
    elif kind == "biased":
        tf = Biased(t0=float(params.pop("t0")))
    elif kind == "custom":
        expression = params.pop("expression")
        if isinstance(expression, str):
            expression = ex.parse(expression)
        tf = Custom(expression=expression, x_names=tuple(params.pop("x_names", ())))
    else:
        raise ValidationFailure(f"unknown transition kind {kind!r}")
    if params:
        raise ValidationFailure(f"unexpected parameters for {kind}: {sorted(params)}")
    x_names = tf.x_names if isinstance(tf, Custom) else ()
    _validate(tf, x_names)
    return tf


# ---------------------------------------------------------------------------
# regularized field

def regularized_field(
    system: PiecewiseSystem,
    transition: TransitionFunction,
    eps: float,
    point: Sequence[float],
) -> np.ndarray:
    """Evaluate the blended field at a full chart point (x..., y)."""
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    pt = np.asarray(point, dtype=float)
    x = pt[:-1]
    psi = transition.value(pt[-1] / eps, x)
    v_plus = system.plus.evaluate(pt)
    v_minus = system.minus.evaluate(pt)
    return 0.5 * (1.0 + psi) * v_plus + 0.5 * (1.0 - psi) * v_minus


# ---------------------------------------------------------------------------
# height function and certificates

@dataclass(frozen=True)
class HeightFunction:
    """h(x, t) restricted to the surface, as evaluable data.

    difference/total are a_plus - a_minus and a_plus + a_minus with y
    substituted by 0; h = psi * difference + total.
    """

    transition: TransitionFunction
    x_names: tuple[str, ...]
    difference: ex.Expr
    total: ex.Expr

    def coefficients(self, x: Sequence[float] | float) -> tuple[float, float]:
        if np.isscalar(x):
            x = (float(x),)
        b = dict(zip(self.x_names, (float(v) for v in x)))
        return ex.evaluate(self.difference, b), ex.evaluate(self.total, b)

    def value(self, x: Sequence[float] | float, t: float) -> tuple[float, float]:
        diff, tot = self.coefficients(x)
        xs = (float(x),) if np.isscalar(x) else tuple(float(v) for v in x)
        h = self.transition.value(t, xs) * diff + tot
        dh = self.transition.deriv_t(t, xs) * diff
        return h, dh


def height_function(system: PiecewiseSystem, transition: TransitionFunction) -> HeightFunction:
    a_plus, a_minus = system.normal_traces
    return HeightFunction(
        transition=transition,
        x_names=system.x_names,
        difference=ex.sub(a_plus, a_minus),
        total=ex.add(a_plus, a_minus),
    )


def height(
    system: PiecewiseSystem,
    transition: TransitionFunction,
    x: Sequence[float] | float,
    t: float,
) -> tuple[float, float]:
    """(h, dh/dt) at surface point x and stretched coordinate t."""
    return height_function(system, transition).value(x, t)


@dataclass(frozen=True)
class HeightRoot:
    t: float
    dh_dt: float


@dataclass(frozen=True)
class DegenerateInterval:
    """h vanished identically between t_lo and t_hi (a_plus = a_minus = 0)."""

    t_lo: float
    t_hi: float


def height_roots(
    system: PiecewiseSystem,
    transition: TransitionFunction,
    x: Sequence[float] | float,
    cells: int = DEFAULT_GRID_CELLS,
    zero_tol: float = DEFAULT_ZERO_TOL,
) -> list[HeightRoot | DegenerateInterval]:
    """Zeros of h(x, .) on [-1, 1].

    Sign changes on a uniform grid are refined by bisection to 1e-12 in t;
    grid nodes where h already vanishes are reported directly.  A run of
    vanishing nodes becomes a DegenerateInterval marker instead of a root.
    """
    hf = height_function(system, transition)
    xs = (float(x),) if np.isscalar(x) else tuple(float(v) for v in x)
    diff, tot = hf.coefficients(xs)

    def h(t: float) -> float:
        return transition.value(t, xs) * diff + tot

    def dh(t: float) -> float:
        return transition.deriv_t(t, xs) * diff

    ts = np.linspace(-1.0, 1.0, cells + 1)
    hs = np.array([h(float(t)) for t in ts])
    near_zero = np.abs(hs) <= zero_tol

    out: list[HeightRoot | DegenerateInterval] = []
    roots: list[float] = []

    # runs of vanishing nodes: single nodes are roots, longer runs are
    # degenerate only if h also vanishes between the nodes
    k = 0
    while k <= cells:
        if not near_zero[k]:
            k += 1
            continue
        j = k
        while j + 1 <= cells and near_zero[j + 1]:
            j += 1
        if j > k and all(
            abs(h(float(0.5 * (ts[i] + ts[i + 1])))) <= zero_tol for i in range(k, j)
        ):
            out.append(DegenerateInterval(float(ts[k]), float(ts[j])))
        else:
            for i in range(k, j + 1):
                roots.append(float(ts[i]))
        k = j + 1

    for k in range(cells):
        if near_zero[k] or near_zero[k + 1]:
            continue
        if hs[k] * hs[k + 1] < 0.0:
            a, b = float(ts[k]), float(ts[k + 1])
            fa = hs[k]
            while b - a > ROOT_BISECTION_TOL:
                mid = 0.5 * (a + b)
                fm = h(mid)
                if fm == 0.0:
                    a = b = mid
                    break
                if fa * fm < 0.0:
                    b = mid
                else:
                    a, fa = mid, fm
            roots.append(0.5 * (a + b))

    roots.sort()
    deduped: list[float] = []
    for t in roots:
        if not deduped or t - deduped[-1] > 2.0 * ROOT_BISECTION_TOL:
            deduped.append(t)
    out.extend(HeightRoot(t, dh(t)) for t in deduped)
    out.sort(key=lambda r: r.t if isinstance(r, HeightRoot) else r.t_lo)
    return out


class Verdict(enum.Enum):
    SLIDING_CERTIFIED = "SlidingCertified"
    SEWING_CERTIFIED = "SewingCertified"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class SlidingCertificate:
    """Outcome of the height-function test at one surface point.

    ``witness`` is the most transversal root when sliding is certified.
    ``min_abs_height`` is the grid minimum of |h|, the sewing evidence.
    Indeterminate is a first-class outcome: tangential roots or a
    degenerate interval land here and are never coerced into a verdict.
    """

    verdict: Verdict
    roots: tuple[HeightRoot, ...]
    degenerate: tuple[DegenerateInterval, ...]
    witness: HeightRoot | None
    min_abs_height: float


def certify(
    system: PiecewiseSystem,
    transition: TransitionFunction,
    x: Sequence[float] | float,
    transversality_tol: float = DEFAULT_TRANSVERSALITY_TOL,
    zero_tol: float = DEFAULT_ZERO_TOL,
    cells: int = DEFAULT_GRID_CELLS,
) -> SlidingCertificate:
    found = height_roots(system, transition, x, cells=cells, zero_tol=zero_tol)
    roots = tuple(r for r in found if isinstance(r, HeightRoot))
    degenerate = tuple(r for r in found if isinstance(r, DegenerateInterval))

    hf = height_function(system, transition)
    xs = (float(x),) if np.isscalar(x) else tuple(float(v) for v in x)
    diff, tot = hf.coefficients(xs)
    ts = np.linspace(-1.0, 1.0, cells + 1)
    min_abs = float(min(abs(transition.value(float(t), xs) * diff + tot) for t in ts))

    transversal = [r for r in roots if abs(r.dh_dt) > transversality_tol]
    if transversal and not degenerate:
        witness = max(transversal, key=lambda r: abs(r.dh_dt))
        return SlidingCertificate(Verdict.SLIDING_CERTIFIED, roots, degenerate, witness, min_abs)
    if not roots and not degenerate and min_abs > zero_tol:
        return SlidingCertificate(Verdict.SEWING_CERTIFIED, roots, degenerate, None, min_abs)
    return SlidingCertificate(Verdict.INDETERMINATE, roots, degenerate, None, min_abs)
