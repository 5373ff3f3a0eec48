import numpy as np
import pytest

from debondwave.characteristics import (
    CharScenario,
    adaptive_simpson,
    dalembert_fixed,
    front_ode_exact,
    front_trace_grid,
    one_sided_derivative,
)
from debondwave.errors import CompatibilityViolated, TooFewSamples
from debondwave.expressions import Const, Poly, SineMode, SpaceTimeField

SQ2 = np.sqrt(2.0)


def test_adaptive_simpson():
    assert abs(adaptive_simpson(np.sin, 0.0, np.pi) - 2.0) < 1e-9
    assert abs(adaptive_simpson(lambda x: x ** 5, 0.0, 1.0) - 1.0 / 6.0) < 1e-12


# --- d'Alembert ------------------------------------------------------------


def test_dalembert_standing_wave():
    u0 = SineMode(1.0, 1).bound(1.0)
    u1 = Const(0.0)
    for t, x in [(0.5, 0.5), (0.3, 0.7), (2.3, 0.2), (1.7, 0.9)]:
        got = dalembert_fixed(1.0, u0, u1, None, t, x)
        assert abs(got - np.cos(np.pi * t) * np.sin(np.pi * x)) < 1e-9


def test_dalembert_velocity_start():
    u1 = SineMode(1.0, 1).bound(1.0)
    for t, x in [(0.5, 0.5), (1.3, 0.25)]:
        got = dalembert_fixed(1.0, Const(0.0), u1, None, t, x)
        assert abs(got - np.sin(np.pi * t) * np.sin(np.pi * x) / np.pi) < 1e-9


def test_dalembert_zero_data():
    assert dalembert_fixed(1.0, Const(0.0), Const(0.0), None, 3.7, 0.4) == 0.0


def test_dalembert_before_first_reflection():
    # for t < dist(x, {0, L}) the solution reads the data directly
    u0 = Poly(0.0, 1.0, -1.0)
    u1 = Poly(0.5, 1.0)
    L, t, x = 1.0, 0.2, 0.5
    direct = 0.5 * (u0(x + t) + u0(x - t)) + 0.5 * u1.integral(x - t, x + t)
    assert abs(dalembert_fixed(L, u0, u1, None, t, x) - direct) < 1e-12


def test_dalembert_forcing_cone():
    # f(t,x) = x with zero data: u = x t^2 / 2 before boundary influence
    f = SpaceTimeField(Poly(0.0, 1.0), Poly(1.0))
    got = dalembert_fixed(1.0, Const(0.0), Const(0.0), f, 0.2, 0.5)
    assert abs(got - 0.5 * 0.04 / 2.0) < 1e-9


def test_dalembert_interior_stencil_residual():
    u0 = SineMode(1.0, 1).bound(1.0)
    u1 = Poly(0.0, 0.5, -0.5)
    h = 1e-3

    def u(t, x):
        return dalembert_fixed(1.0, u0, u1, None, t, x)

    t0, x0 = 0.4, 0.55
    utt = (u(t0 + h, x0) - 2 * u(t0, x0) + u(t0 - h, x0)) / h ** 2
    uxx = (u(t0, x0 + h) - 2 * u(t0, x0) + u(t0, x0 - h)) / h ** 2
    assert abs(utt - uxx) < 1e-4


# --- front ODE ---------------------------------------------------------------


def constant_scenario(horizon=5.0):
    return CharScenario(l0=1.0, u0=Poly(2.0, -2.0), u1=Const(SQ2),
                        kappa=Const(1.0), horizon=horizon)


def test_front_ode_constant_data():
    fc = front_ode_exact(constant_scenario(), dt=1e-3)
    assert np.max(np.abs(fc.speed - SQ2 / 2.0)) < 1e-12
    assert abs(fc.tstar - (2.0 + SQ2)) < 1e-8
    assert abs(fc.position_at(1.7) - (1.0 + 1.7 * SQ2 / 2.0)) < 1e-10


def test_front_ode_horizon_hits_characteristic():
    fc = front_ode_exact(constant_scenario(), dt=1e-3)
    # at T* the backward characteristic foot l(t) - t reaches zero
    assert abs(fc.position[-1] - fc.times[-1]) < 1e-3


def test_front_ode_subcritical_rest():
    sc = CharScenario(l0=1.0, u0=Poly(1.0, -1.0), u1=Const(0.0),
                      kappa=Const(1.0), horizon=2.0)
    fc = front_ode_exact(sc, dt=1e-2)
    assert np.max(fc.speed) == 0.0
    assert np.max(fc.position) == 1.0


def test_front_ode_critical_equality_is_stationary():
    sc = CharScenario(l0=1.0, u0=Poly(2.0, -2.0), u1=Const(SQ2 - 2.0),
                      kappa=Const(1.0), horizon= 2.0)
    fc = front_ode_exact(sc, dt=1e-2, check=False)
    assert np.max(fc.speed) < 1e-12


def test_front_ode_forcing_consistency():
    # with constant forcing the ODE right-hand side uses the line integral c t
    sc = CharScenario(l0=1.0, u0=Poly(2.0, -2.0), u1=Const(SQ2),
                      kappa=Const(1.0), horizon=1.5,
                      forcing=SpaceTimeField(Const(0.5)))
    fc = front_ode_exact(sc, dt=2e-3)
    for i in range(0, len(fc.times), 150):
        t = fc.times[i]
        F = -2.0 - SQ2 - 0.5 * t
        expect = max((F * F - 2.0) / (F * F + 2.0), 0.0)
        assert abs(fc.speed[i] - expect) < 1e-9


def test_front_compatibility_guard():
    bad = CharScenario(l0=1.0, u0=Poly(2.0, -2.0), u1=Const(1.0),
                       kappa=Const(1.0), horizon=1.0)
    with pytest.raises(CompatibilityViolated):
        front_ode_exact(bad)


# --- boundary traces -----------------------------------------------------------


def test_one_sided_derivative_exact_on_quadratics():
    h = 0.05
    xs = np.array([1.0 - 2 * h, 1.0 - h, 1.0])
    f = 3.0 * xs ** 2 - xs
    assert abs(one_sided_derivative(f, h, "right") - (6.0 - 1.0)) < 1e-12
    xs = np.array([0.0, h, 2 * h])
    f = 3.0 * xs ** 2 - xs
    assert abs(one_sided_derivative(f, h, "left") + 1.0) < 1e-12


def test_front_trace_grid_polynomial_probe():
    ell = 2.0
    xs = np.linspace(0.0, ell, 41)
    h = xs[1] - xs[0]
    vals = xs * (ell - xs)
    vels = np.full_like(xs, 0.3)
    p, ud = front_trace_grid(vals, vels, h, side="right")
    assert abs(p + ell) < 1e-10   # outward derivative -l
    assert abs(ud - 0.3) < 1e-12


def test_front_trace_grid_standing_wave():
    xs = np.linspace(0.0, 1.0, 201)
    h = xs[1] - xs[0]
    t = 0.3
    vals = np.cos(np.pi * t) * np.sin(np.pi * xs)
    vels = -np.pi * np.sin(np.pi * t) * np.sin(np.pi * xs)
    p, _ = front_trace_grid(vals, vels, h, side="right")
    assert abs(p - np.pi * np.cos(np.pi * t) * np.cos(np.pi)) < 5e-4


def test_front_trace_zero_field():
    xs = np.linspace(0.0, 1.0, 11)
    p, ud = front_trace_grid(np.zeros_like(xs), np.zeros_like(xs), 0.1, "right")
    assert p == 0.0 and ud == 0.0


def test_front_trace_needs_three_samples():
    with pytest.raises(TooFewSamples):
        front_trace_grid(np.zeros(3), np.zeros(3), 0.1, side="right")


def test_front_trace_physical_probe():
    from debondwave.characteristics import front_trace_physical

    ell = 1.3

    def u_eval(x):
        return np.asarray(x) * (ell - np.asarray(x))

    def udot_eval(x):
        return np.full_like(np.asarray(x, dtype=float), 0.7)

    p, ud = front_trace_physical(u_eval, udot_eval, ell, spacing=0.01, side="right")
    assert abs(p + ell) < 1e-10
    assert abs(ud - 0.7) < 1e-12
    # left end of the same probe: outward normal is -1
    p2, _ = front_trace_physical(u_eval, udot_eval, 0.0, spacing=0.01, side="left")
    assert abs(p2 + ell) < 1e-10
