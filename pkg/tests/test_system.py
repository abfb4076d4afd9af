import numpy as np
import pytest

from filippov.expr import Const, evaluate, parse
from filippov.system import (
    NotSlidingError,
    PiecewiseSystem,
    SigmaClass,
    VectorFieldDef,
    classify_point,
    field_from_strings,
    filippov_sliding_field,
    lie_derivative,
    system_from_strings,
)


def fold():
    # upper field grazes the surface at x = 0, lower field always pushes up
    return system_from_strings(("x", "y"), ("1", "2*x"), ("1", "2"))


def random_system(rng, dim=2):
    """Random polynomial fields of degree <= 2 in an adapted chart."""
    names = tuple(f"x{i}" for i in range(1, dim)) + ("y",)

    def poly():
        c = rng.uniform(-2, 2, size=1 + 2 * dim)
        terms = [f"{c[0]:.6f}"]
        for i, n in enumerate(names):
            terms.append(f"{c[1 + 2 * i]:.6f}*{n}")
            terms.append(f"{c[2 + 2 * i]:.6f}*{n}^2")
        return " + ".join(terms)

    plus = tuple(poly() for _ in names)
    minus = tuple(poly() for _ in names)
    return system_from_strings(names, plus, minus)


def test_field_validation():
    with pytest.raises(ValueError):
        VectorFieldDef(("x", "y"), (parse("1"),))
    with pytest.raises(ValueError):
        VectorFieldDef(("x",), (parse("1"),))
    with pytest.raises(ValueError):
        VectorFieldDef(("x", "x"), (parse("1"), parse("1")))
    with pytest.raises(ValueError) as err:
        field_from_strings(("x", "y"), ("z + 1", "0"))
    assert "z" in str(err.value)


def test_field_evaluate():
    f = field_from_strings(("x", "y"), ("x + y", "x*y"))
    assert np.allclose(f.evaluate((2.0, 3.0)), [5.0, 6.0])
    with pytest.raises(ValueError):
        f.evaluate((1.0, 2.0, 3.0))


def test_system_chart_agreement():
    a = field_from_strings(("x", "y"), ("1", "1"))
    b = field_from_strings(("u", "y"), ("1", "1"))
    with pytest.raises(ValueError):
        PiecewiseSystem(a, b)


def test_normal_traces_drop_y():
    sys = system_from_strings(("x", "y"), ("1", "x + y^2"), ("1", "y - 3"))
    ap, am = sys.normal_components_on_sigma(2.0)
    assert ap == 2.0
    assert am == -3.0
    assert sys.normal_traces[1] == Const(-3.0)


def test_classify_fold():
    sys = fold()
    assert classify_point(sys, -0.5) == SigmaClass.SLIDING
    assert classify_point(sys, 0.5) == SigmaClass.SEWING
    assert classify_point(sys, 0.0) == SigmaClass.SIGMA_SINGULAR
    # the tolerance band around the graze: product is 4x
    assert classify_point(sys, 2.4e-10) == SigmaClass.SIGMA_SINGULAR
    assert classify_point(sys, 2.6e-10) == SigmaClass.SEWING
    with pytest.raises(ValueError):
        classify_point(sys, 0.5, tol=-1.0)


def test_classify_matches_sign_product():
    rng = np.random.default_rng(3)
    for _ in range(40):
        sys = random_system(rng)
        for _ in range(25):
            x = float(rng.uniform(-2, 2))
            ap, am = sys.normal_components_on_sigma(x)
            got = classify_point(sys, x)
            if abs(ap * am) <= 1e-9:
                assert got == SigmaClass.SIGMA_SINGULAR
            elif ap * am > 0:
                assert got == SigmaClass.SEWING
            else:
                assert got == SigmaClass.SLIDING


def test_sliding_field_fold():
    lam, v = filippov_sliding_field(fold(), -0.5)
    assert lam == pytest.approx(2.0 / 3.0)
    assert v[0] == pytest.approx(1.0)
    assert v[1] == 0.0  # exactly, by construction


def test_sliding_field_rejects_non_sliding():
    with pytest.raises(NotSlidingError) as err:
        filippov_sliding_field(fold(), 0.5)
    assert err.value.verdict == SigmaClass.SEWING
    with pytest.raises(NotSlidingError):
        filippov_sliding_field(fold(), 0.0)


def test_sliding_field_tangency_and_convexity():
    rng = np.random.default_rng(11)
    found = 0
    while found < 60:
        sys = random_system(rng, dim=rng.integers(2, 4))
        x = rng.uniform(-2, 2, size=sys.dim - 1)
        if classify_point(sys, x) != SigmaClass.SLIDING:
            continue
        found += 1
        lam, v = filippov_sliding_field(sys, x)
        assert 0.0 < lam < 1.0
        assert v[-1] == 0.0
        point = tuple(x) + (0.0,)
        expect = lam * sys.plus.evaluate(point) + (1 - lam) * sys.minus.evaluate(point)
        assert np.allclose(v[:-1], expect[:-1], atol=1e-12)


def test_sliding_matches_normal_average_form():
    # the tangential sliding velocity equals the average of the one-sided
    # tangential components corrected by the normal imbalance
    rng = np.random.default_rng(13)
    found = 0
    while found < 60:
        sys = random_system(rng)
        x = float(rng.uniform(-2, 2))
        if classify_point(sys, x) != SigmaClass.SLIDING:
            continue
        found += 1
        ap, am = sys.normal_components_on_sigma(x)
        point = (x, 0.0)
        bp = sys.plus.evaluate(point)[0]
        bm = sys.minus.evaluate(point)[0]
        psi_star = -(ap + am) / (ap - am)
        expect = 0.5 * ((bp + bm) + psi_star * (bp - bm))
        _, v = filippov_sliding_field(sys, x)
        assert v[0] == pytest.approx(expect, rel=1e-12, abs=1e-12)


def test_lie_derivative():
    f = field_from_strings(("x", "y"), ("y", "-x"))
    g = parse("x^2 + y^2")
    # rotation preserves the radius
    d = lie_derivative(f, g)
    for x, y in ((1.0, 2.0), (-0.3, 0.7)):
        assert abs(evaluate(d, {"x": x, "y": y})) < 1e-12
    with pytest.raises(ValueError):
        lie_derivative(f, parse("q"))


def test_three_dimensional_chart():
    sys = system_from_strings(
        ("x1", "x2", "y"), ("x2", "-x1", "x1 - 1"), ("0", "0", "1")
    )
    assert sys.x_names == ("x1", "x2")
    assert sys.y_name == "y"
    assert classify_point(sys, (0.0, 5.0)) == SigmaClass.SLIDING
    assert classify_point(sys, (2.0, 5.0)) == SigmaClass.SEWING
    lam, v = filippov_sliding_field(sys, (0.0, 3.0))
    # a_plus = -1, a_minus = 1 so lam = 1/2
    assert lam == pytest.approx(0.5)
    assert np.allclose(v, [1.5, 0.0, 0.0])
