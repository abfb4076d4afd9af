"""Piecewise-smooth systems split by a codimension-one switching surface.

Everything works in an adapted chart: coordinates (x_1, ..., x_{n-1}, y)
with the switching surface Sigma = {y = 0}.  The last coordinate is always
the distinguished normal one.  A field's y-component controls how orbits
meet Sigma; the tangential components move points along it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import expr as ex

DEFAULT_CLASS_TOL = 1e-9


class SigmaClass(enum.Enum):
    SEWING = "Sewing"
    SLIDING = "Sliding"
    SIGMA_SINGULAR = "SigmaSingular"


class NotSlidingError(Exception):
    def __init__(self, point, verdict: SigmaClass):
        self.point = tuple(point)
        self.verdict = verdict
        super().__init__(f"point {self.point} classifies as {verdict.value}, not Sliding")


@dataclass(frozen=True)
class VectorFieldDef:
    """A smooth vector field given componentwise by expressions.

    ``coords`` are the chart coordinate names in order, the last being the
    normal coordinate y.  ``components[i]`` is the coefficient of
    d/d(coords[i]).
    """

    coords: tuple[str, ...]
    components: tuple[ex.Expr, ...]

    def __post_init__(self):
        if len(self.coords) != len(self.components):
            raise ValueError(
                f"{len(self.coords)} coordinates but {len(self.components)} components"
            )
        if len(self.coords) < 2:
            raise ValueError("need at least two coordinates (tangential + normal)")
        if len(set(self.coords)) != len(self.coords):
            raise ValueError(f"duplicate coordinate names in {self.coords}")
        allowed = set(self.coords)
        for name, comp in zip(self.coords, self.components):
            extra = ex.free_vars(comp) - allowed
            if extra:
                raise ValueError(
                    f"component for {name} uses unknown variables {sorted(extra)}"
                )

    @property
    def dim(self) -> int:
        return len(self.coords)

    def bindings(self, point: Sequence[float]) -> ex.Bindings:
        pt = np.asarray(point, dtype=float)
        if pt.shape != (self.dim,):
            raise ValueError(f"expected point of dimension {self.dim}, got shape {pt.shape}")
        return dict(zip(self.coords, pt.tolist()))

    def evaluate(self, point: Sequence[float]) -> np.ndarray:
        b = self.bindings(point)
        return np.array([ex.evaluate(c, b) for c in self.components], dtype=float)


def field_from_strings(coords: Sequence[str], components: Sequence[str]) -> VectorFieldDef:
    return VectorFieldDef(tuple(coords), tuple(ex.parse(c) for c in components))


@dataclass(frozen=True)
class PiecewiseSystem:
    """Two smooth fields glued along Sigma = {y = 0}.

    ``plus`` governs y > 0 and ``minus`` governs y < 0.  Both must share the
    same coordinate chart.
    """

    plus: VectorFieldDef
    minus: VectorFieldDef
    normal_traces: tuple[ex.Expr, ex.Expr] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.plus.coords != self.minus.coords:
            raise ValueError(
                f"field charts disagree: {self.plus.coords} vs {self.minus.coords}"
            )
        y = self.y_name
        traces = (
            ex.substitute(self.plus.components[-1], {y: 0.0}),
            ex.substitute(self.minus.components[-1], {y: 0.0}),
        )
        object.__setattr__(self, "normal_traces", traces)

    @property
    def coords(self) -> tuple[str, ...]:
        return self.plus.coords

    @property
    def dim(self) -> int:
        return self.plus.dim

    @property
    def y_name(self) -> str:
        return self.coords[-1]

    @property
    def x_names(self) -> tuple[str, ...]:
        return self.coords[:-1]

    def tangential_bindings(self, x: Sequence[float] | float) -> ex.Bindings:
        """Bindings for a point given by its Sigma coordinates (y is set to 0)."""
        if np.isscalar(x):
            x = (float(x),)
        x = tuple(float(v) for v in x)
        if len(x) != self.dim - 1:
            raise ValueError(f"expected {self.dim - 1} tangential coordinates, got {len(x)}")
        b = dict(zip(self.x_names, x))
        b[self.y_name] = 0.0
        return b

    def normal_components_on_sigma(self, x: Sequence[float] | float) -> tuple[float, float]:
        """(a_plus, a_minus) evaluated at (x, 0)."""
        b = self.tangential_bindings(x)
        return ex.evaluate(self.normal_traces[0], b), ex.evaluate(self.normal_traces[1], b)


def system_from_strings(
    coords: Sequence[str], plus: Sequence[str], minus: Sequence[str]
) -> PiecewiseSystem:
    return PiecewiseSystem(field_from_strings(coords, plus), field_from_strings(coords, minus))


def lie_derivative(field_def: VectorFieldDef, g: ex.Expr) -> ex.Expr:
    """Derivative of the scalar g along the field, sum_i X_i * dg/dx_i."""
    extra = ex.free_vars(g) - set(field_def.coords)
    if extra:
        raise ValueError(f"scalar uses unknown variables {sorted(extra)}")
    out: ex.Expr = ex.Const(0.0)
    for name, comp in zip(field_def.coords, field_def.components):
        out = ex.add(out, ex.mul(comp, ex.differentiate(g, name)))
    return out


def classify_point(
    system: PiecewiseSystem, x: Sequence[float] | float, tol: float = DEFAULT_CLASS_TOL
) -> SigmaClass:
    """Classify the Sigma point with tangential coordinates ``x``.

    The product a_plus * a_minus of the normal components decides: positive
    means orbits sew straight through, negative means both fields point at
    the surface (or both away) and a sliding segment exists, and a value
    within ``tol`` of zero is left as singular rather than forced into
    either class.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    a_plus, a_minus = system.normal_components_on_sigma(x)
    product = a_plus * a_minus
    if abs(product) <= tol:
        return SigmaClass.SIGMA_SINGULAR
    return SigmaClass.SEWING if product > 0 else SigmaClass.SLIDING


def filippov_sliding_field(
    system: PiecewiseSystem, x: Sequence[float] | float, tol: float = DEFAULT_CLASS_TOL
) -> tuple[float, np.ndarray]:
    """Convex combination of the two fields tangent to Sigma at (x, 0).

    Returns (lam, field) where lam = a_minus / (a_minus - a_plus) and
    field = lam * X_plus + (1 - lam) * X_minus evaluated at (x, 0).  The
    y-component of the result vanishes by construction.  Raises
    NotSlidingError unless the point classifies as Sliding.
    """
    verdict = classify_point(system, x, tol)
    if verdict != SigmaClass.SLIDING:
        raise NotSlidingError(x if not np.isscalar(x) else (x,), verdict)
    a_plus, a_minus = system.normal_components_on_sigma(x)
    lam = a_minus / (a_minus - a_plus)
    b = system.tangential_bindings(x)
    point = [b[name] for name in system.coords]
    v_plus = system.plus.evaluate(point)
    v_minus = system.minus.evaluate(point)
    field = lam * v_plus + (1.0 - lam) * v_minus
    field[-1] = 0.0  # lam * a_plus + (1 - lam) * a_minus cancels exactly
    return lam, field
