import math

import numpy as np
import pytest

from filippov.dynamics import (
    Equilibrium,
    EventKind,
    IntegratorOptions,
    NoSlidingAtError,
    UnresolvedSingularityError,
    equilibria_on_manifold,
    hausdorff,
    integrate,
    integrate_filippov,
    track_manifold,
)
from filippov.regularize import Biased, Smoothstep
from filippov.system import system_from_strings


def fold():
    return system_from_strings(("x", "y"), ("1", "2*x"), ("1", "2"))


# ---------------------------------------------------------------------------
# smooth integration


def test_harmonic_oscillator_energy():
    fn = lambda t, y: np.array([y[1], -y[0]])
    traj = integrate(fn, (1.0, 0.0), (0.0, 2 * math.pi))
    energy = 0.5 * (traj.states[:, 0] ** 2 + traj.states[:, 1] ** 2)
    assert np.max(np.abs(energy - 0.5)) < 1e-7
    assert np.linalg.norm(traj.final_state - [1.0, 0.0]) < 1e-7


def test_exponential_accuracy():
    fn = lambda t, y: y
    traj = integrate(fn, (1.0,), (0.0, 1.0))
    assert traj.final_state[0] == pytest.approx(math.e, rel=1e-8)


def test_dense_output():
    fn = lambda t, y: np.array([y[1], -y[0]])
    traj = integrate(fn, (1.0, 0.0), (0.0, math.pi))
    for t in np.linspace(0, math.pi, 37):
        got = traj.sample(float(t))
        assert got[0] == pytest.approx(math.cos(t), abs=1e-6)
        assert got[1] == pytest.approx(-math.sin(t), abs=1e-6)
    assert np.array_equal(traj.sample(traj.final_time), traj.final_state)
    with pytest.raises(ValueError):
        traj.sample(-0.1)
    with pytest.raises(ValueError):
        traj.sample(math.pi + 0.1)


def test_rk4_fixed_step():
    fn = lambda t, y: y
    opts = IntegratorOptions(method="rk4", max_step=0.1)
    traj = integrate(fn, (1.0,), (0.0, 1.0), opts)
    assert len(traj.times) == 11
    assert np.allclose(np.diff(traj.times), 0.1)
    assert traj.final_time == pytest.approx(1.0, abs=1e-15)
    # classic fourth order: halving the step cuts the error ~16x
    err1 = abs(traj.final_state[0] - math.e)
    traj2 = integrate(fn, (1.0,), (0.0, 1.0), IntegratorOptions(method="rk4", max_step=0.05))
    err2 = abs(traj2.final_state[0] - math.e)
    assert err1 / err2 == pytest.approx(16.0, rel=0.2)


def test_method_validation():
    fn = lambda t, y: y
    with pytest.raises(ValueError):
        integrate(fn, (1.0,), (0.0, 1.0), IntegratorOptions(method="euler"))
    with pytest.raises(ValueError):
        integrate(fn, (1.0,), (1.0, 0.0))
    # degenerate span returns the single initial node
    traj = integrate(fn, (1.0,), (0.5, 0.5))
    assert len(traj.times) == 1
    assert traj.final_time == 0.5


def test_step_failure_near_blowup():
    # y' = y^2 from 1 explodes at t = 1; the controller gives up cleanly
    fn = lambda t, y: y * y
    traj = integrate(fn, (1.0,), (0.0, 2.0))
    assert traj.events
    assert traj.events[-1].kind == EventKind.STEP_FAILURE
    assert traj.final_time < 2.0
    assert traj.final_time == pytest.approx(1.0, abs=1e-3)


# ---------------------------------------------------------------------------
# hybrid integration


def test_hybrid_crossing_then_slide():
    # constant normals: fall onto the surface at t = 1, then slide to x = 2
    sys = system_from_strings(("x", "y"), ("1", "-1"), ("1", "1"))
    traj = integrate_filippov(sys, (0.0, 1.0), (0.0, 2.0))
    assert np.allclose(traj.final_state, [2.0, 0.0], atol=1e-9)
    assert traj.final_time == pytest.approx(2.0, abs=1e-12)
    kinds = [e.kind for e in traj.events]
    assert kinds == [EventKind.SIGMA_HIT, EventKind.SLIDE_ENTRY]
    for e in traj.events:
        assert e.time == pytest.approx(1.0, abs=1e-9)
        assert np.allclose(e.state, [1.0, 0.0], atol=1e-9)
    # the slide keeps y pinned to zero at every recorded node
    on_slide = traj.times >= traj.events[-1].time
    assert np.all(traj.states[on_slide, 1] == 0.0)


def test_hybrid_sewing_passes_through():
    sys = system_from_strings(("x", "y"), ("1", "1"), ("2", "1"))
    traj = integrate_filippov(sys, (0.0, -0.5), (0.0, 1.0))
    kinds = [e.kind for e in traj.events]
    assert kinds == [EventKind.SIGMA_HIT]
    hit = traj.events[0]
    assert hit.time == pytest.approx(0.5, abs=1e-9)
    assert np.allclose(hit.state, [1.0, 0.0], atol=1e-9)
    assert np.allclose(traj.final_state, [1.5, 0.5], atol=1e-9)


def test_hybrid_slide_exit():
    # sliding on the fold pushes x toward the graze where the upper weight
    # saturates; the orbit then leaves along the upper field
    traj = integrate_filippov(fold(), (-0.5, 0.0), (0.0, 1.0))
    kinds = [e.kind for e in traj.events]
    assert kinds == [EventKind.SLIDE_ENTRY, EventKind.SLIDE_EXIT]
    entry, exit_ = traj.events
    assert entry.time == 0.0
    assert exit_.time == pytest.approx(0.5, abs=1e-6)
    assert exit_.state[0] == pytest.approx(0.0, abs=1e-6)
    # ballistic arc afterwards: x = t - 1/2, y = (t - 1/2)^2
    assert traj.final_state[0] == pytest.approx(0.5, abs=1e-6)
    assert traj.final_state[1] == pytest.approx(0.25, abs=1e-6)


def test_hybrid_starts_on_surface_sewing():
    sys = system_from_strings(("x", "y"), ("1", "2"), ("1", "1"))
    traj = integrate_filippov(sys, (0.0, 0.0), (0.0, 1.0))
    assert traj.events == []
    assert np.allclose(traj.final_state, [1.0, 2.0], atol=1e-9)


def test_hybrid_singular_hit():
    # the lower normal component vanishes exactly where the orbit lands
    sys = system_from_strings(("x", "y"), ("1", "-1"), ("1", "x"))
    with pytest.raises(UnresolvedSingularityError) as err:
        integrate_filippov(sys, (-0.5, 0.5), (0.0, 2.0))
    assert err.value.time == pytest.approx(0.5, abs=1e-9)
    assert err.value.state[0] == pytest.approx(0.0, abs=1e-9)
    partial = err.value.trajectory
    assert partial.final_time == pytest.approx(0.5, abs=1e-9)
    kinds = [e.kind for e in partial.events]
    assert kinds == [EventKind.SIGMA_HIT, EventKind.STEP_FAILURE]


def test_hybrid_singular_start():
    sys = system_from_strings(("x", "y"), ("1", "0"), ("1", "1"))
    with pytest.raises(UnresolvedSingularityError) as err:
        integrate_filippov(sys, (0.0, 0.0), (0.0, 1.0))
    assert err.value.time == 0.0
    assert err.value.trajectory.events[-1].kind == EventKind.STEP_FAILURE


def test_hybrid_dimension_check():
    with pytest.raises(ValueError):
        integrate_filippov(fold(), (0.0, 0.0, 0.0), (0.0, 1.0))


def test_hybrid_three_dimensional_slide():
    # rotation in the surface plane while both fields press onto it
    sys = system_from_strings(
        ("x1", "x2", "y"), ("-x2", "x1", "-1"), ("-x2", "x1", "1")
    )
    traj = integrate_filippov(sys, (1.0, 0.0, 0.0), (0.0, math.pi))
    assert [e.kind for e in traj.events] == [EventKind.SLIDE_ENTRY]
    assert np.allclose(traj.final_state, [-1.0, 0.0, 0.0], atol=1e-6)
    assert np.all(traj.states[:, 2] == 0.0)


# ---------------------------------------------------------------------------
# manifold tracking


def test_track_manifold_fold():
    xs = np.linspace(-1.0, -0.1, 10)
    track = track_manifold(fold(), Smoothstep(), 0.1, xs)
    assert len(track.points) == 10
    assert track.excluded == ()
    for p in track.points:
        assert p.y == pytest.approx(0.1 * p.t)
        # root of psi(t) = (x+1)/(1-x)
        level = (p.x + 1) / (1 - p.x)
        assert Smoothstep().value(p.t) == pytest.approx(level, abs=1e-9)


def test_track_manifold_t_independent_of_eps():
    xs = np.linspace(-1.0, -0.1, 7)
    a = track_manifold(fold(), Smoothstep(), 0.1, xs)
    b = track_manifold(fold(), Smoothstep(), 0.05, xs)
    for pa, pb in zip(a.points, b.points):
        assert pa.t == pb.t
        assert pa.y == pytest.approx(2.0 * pb.y)


def test_track_manifold_exclusions():
    xs = [-0.5, 0.0, 0.5]
    track = track_manifold(fold(), Smoothstep(), 0.1, xs)
    assert [p.x for p in track.points] == [-0.5]
    reasons = dict(track.excluded)
    assert reasons[0.0] == "only tangential roots"
    assert reasons[0.5] == "no root: not a sliding point"

    with pytest.raises(NoSlidingAtError) as err:
        track_manifold(fold(), Smoothstep(), 0.1, [0.4, 0.6])
    assert err.value.x == 0.4

    with pytest.raises(ValueError):
        track_manifold(fold(), Smoothstep(), 0.0, xs)


def test_track_manifold_degenerate_reason():
    # both normal components vanish at x = 0 but the system slides elsewhere
    sys = system_from_strings(("x", "y"), ("1", "-x^2"), ("1", "x^2"))
    track = track_manifold(sys, Smoothstep(), 0.1, [-0.5, 0.0])
    assert [p.x for p in track.points] == [-0.5]
    assert dict(track.excluded)[0.0] == "height function degenerates"


def test_hausdorff():
    a = np.array([[0.0, 0.0], [1.0, 0.0]])
    b = np.array([[0.0, 0.5]])
    assert hausdorff(a, b) == pytest.approx(math.sqrt(1.25))
    assert hausdorff(b, a) == hausdorff(a, b)
    assert hausdorff(a, a) == 0.0
    # 1-d inputs promote to single-coordinate points
    assert hausdorff(np.array([0.0, 1.0]), np.array([0.0])) == 1.0
    with pytest.raises(ValueError):
        hausdorff(np.zeros((0, 2)), b)


# ---------------------------------------------------------------------------
# equilibria on the sliding manifold


def trichotomy_system():
    return system_from_strings(("x", "y"), ("x^2 + y", "-1"), ("x^2 + y", "1"))


def test_equilibria_two():
    eqs = equilibria_on_manifold(trichotomy_system(), Biased(-0.5), 0.02, (-1.0, 1.0))
    assert len(eqs) == 2
    assert eqs[0].x == pytest.approx(-0.1, abs=1e-9)
    assert eqs[0].stability == -1
    assert eqs[1].x == pytest.approx(0.1, abs=1e-9)
    assert eqs[1].stability == 1


def test_equilibria_one_degenerate():
    eqs = equilibria_on_manifold(trichotomy_system(), Biased(0.0), 0.02, (-1.0, 1.0))
    assert len(eqs) == 1
    assert eqs[0].x == pytest.approx(0.0, abs=1e-6)
    assert eqs[0].stability == 0


def test_equilibria_none():
    eqs = equilibria_on_manifold(trichotomy_system(), Biased(0.5), 0.02, (-1.0, 1.0))
    assert eqs == []


def test_equilibria_validation():
    sys3 = system_from_strings(("x1", "x2", "y"), ("1", "0", "-1"), ("1", "0", "1"))
    with pytest.raises(ValueError):
        equilibria_on_manifold(sys3, Smoothstep(), 0.1, (-1.0, 1.0))
    with pytest.raises(ValueError):
        equilibria_on_manifold(trichotomy_system(), Smoothstep(), -0.1, (-1.0, 1.0))
