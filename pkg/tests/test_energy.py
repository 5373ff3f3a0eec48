import numpy as np
import pytest

from debondwave.domains import Interval
from debondwave.energy import (
    balance_residual_fixed,
    ledger_transformed,
    measure_identity_residual,
    release_rate_density,
    total_release_rate,
)
from debondwave.errors import SupersonicSpeed
from debondwave.expressions import Affine, Const, Poly
from debondwave.domains import Ball, Box, Tetrahedron
from debondwave.fd import solve_fd
from debondwave.galerkin import SineBasis, Trajectory, solve_transformed_modal
from debondwave.griffith import flow_rule
from debondwave.motion import (
    homothetic,
    identity_motion,
    interval_flow,
    one_d_scaling,
    radial_annulus_flow,
)
from debondwave.transform import PulledBackProblem


def _standing_wave_trajectory(nt=501, m=3):
    basis = SineBasis(1.0, m)
    ts = np.linspace(0.0, 1.0, nt)
    vals = np.zeros((nt, m))
    vels = np.zeros((nt, m))
    amp = 1.0 / np.sqrt(2.0)  # so v = cos(pi t) sin(pi y)
    vals[:, 0] = amp * np.cos(np.pi * ts)
    vels[:, 0] = -amp * np.pi * np.sin(np.pi * ts)
    return Trajectory(kind="modal", times=ts, values=vals, velocities=vels,
                      L=1.0, basis=basis)


def test_static_ledger_conserves_energy():
    fam = identity_motion(Interval(1.0), 1.0)
    led = ledger_transformed(_standing_wave_trajectory(), fam)
    total = led.kinetic + led.potential
    assert np.max(np.abs(total - np.pi ** 2 / 4.0)) < 1e-10
    assert np.max(np.abs(led.boundary_dissipation)) < 1e-13
    assert np.max(led.residual_moving) < 1e-6


def test_zero_solution_ledger():
    basis = SineBasis(1.0, 2)
    ts = np.linspace(0.0, 1.0, 11)
    z = np.zeros((11, 2))
    traj = Trajectory(kind="modal", times=ts, values=z, velocities=z.copy(),
                      L=1.0, basis=basis)
    led = ledger_transformed(traj, identity_motion(Interval(1.0), 1.0),
                             kappa=Const(1.0))
    for arr in (led.kinetic, led.potential, led.work, led.boundary_dissipation,
                led.debond_dissipation, led.residual_moving):
        assert np.max(np.abs(arr)) == 0.0


def test_debond_dissipation_both_forms():
    # kappa = 1, l = 1 + t/2: dissipated energy t/2, also |Omega_t| - |Omega_0|
    fam = one_d_scaling(Affine(1.0, 0.5), 1.0)
    traj = _standing_wave_trajectory(nt=201)
    led = ledger_transformed(traj, fam, kappa=Const(1.0))
    expect = 0.5 * led.times
    assert np.max(np.abs(led.debond_dissipation - expect)) < 1e-6
    geo = np.array([fam.domain_measure(t) - fam.domain_measure(0.0) for t in led.times])
    assert np.max(np.abs(led.debond_dissipation - geo)) < 1e-6


def test_fixed_balance_identity_and_zero():
    pb = PulledBackProblem(identity_motion(Interval(1.0), 1.0))
    res = balance_residual_fixed(_standing_wave_trajectory(), pb)
    assert np.max(res) < 1e-6
    basis = SineBasis(1.0, 2)
    ts = np.linspace(0.0, 1.0, 11)
    z = np.zeros((11, 2))
    zero = Trajectory(kind="modal", times=ts, values=z, velocities=z.copy(),
                      L=1.0, basis=basis)
    assert np.max(balance_residual_fixed(zero, pb)) == 0.0


def test_fixed_balance_moving_run():
    fam = one_d_scaling(Affine(1.0, 0.5), 1.0)
    pb = PulledBackProblem(fam)
    traj = solve_transformed_modal(pb, 1.0, lambda y: np.sin(np.pi * y),
                                   lambda y: 0.0 * np.asarray(y), m=32, dt=1e-3, T=1.0)
    assert np.max(balance_residual_fixed(traj, pb)) < 1e-3


def test_moving_balance_first_order_in_resolution():
    fam = one_d_scaling(Affine(1.0, 0.5), 1.0)
    pb = PulledBackProblem(fam)
    v0 = lambda y: np.sin(np.pi * y)
    v1 = lambda y: 0.0 * np.asarray(y)
    r = []
    for n, dt in ((200, 2e-3), (400, 1e-3)):
        traj = solve_fd(pb, 1.0, n, v0, v1, dt=dt, T=1.0)
        r.append(float(ledger_transformed(traj, fam).residual_moving.max()))
    assert 1.3 <= r[0] / r[1] <= 3.0


def test_boundary_dissipation_monotone():
    fam = one_d_scaling(Affine(1.0, 0.5), 1.0)
    pb = PulledBackProblem(fam)
    traj = solve_fd(pb, 1.0, 200, lambda y: np.sin(np.pi * y),
                    lambda y: 0.0 * np.asarray(y), dt=2e-3, T=1.0)
    led = ledger_transformed(traj, fam)
    assert np.min(np.diff(led.boundary_dissipation)) >= -1e-13


# --- release rate -----------------------------------------------------------


def test_release_rate_values():
    assert abs(release_rate_density(2.0, alpha=0.0) - 2.0) < 1e-14
    assert abs(release_rate_density(2.0, alpha=0.6) - 1.28) < 1e-14
    assert release_rate_density(0.0, alpha=0.3) == 0.0
    with pytest.raises(SupersonicSpeed):
        release_rate_density(1.0, alpha=1.0)


def test_release_rate_equivalent_form_on_consistent_pairs():
    rng = np.random.default_rng(3)
    for _ in range(200):
        p = rng.uniform(0.5, 5.0) * (1 if rng.uniform() < 0.5 else -1)
        k = rng.uniform(0.1, 5.0)
        om = flow_rule(p, k)
        # consistent kinematic pair u_dot = -omega p; both forms must agree
        release_rate_density(p, udot=-om * p, alpha=om, tol=1e-10)


def test_total_release_rate():
    # 1d: only the moving endpoint contributes
    G = total_release_rate(omega=[0.0, 0.5], p=[1.0, 2.0], weights=[1.0, 1.0])
    assert abs(G - 0.5 * (1 - 0.25) * 4.0) < 1e-14
    assert total_release_rate([0.0, 0.0], [1.0, 1.0], [1.0, 1.0]) is None
    # radial: constant over the circle equals the pointwise density
    om = np.full(64, 0.3)
    p = np.full(64, 1.7)
    w = np.full(64, 2 * np.pi * 0.8 / 64)
    G = total_release_rate(om, p, w)
    assert abs(G - 0.5 * (1 - 0.09) * 1.7 ** 2) < 1e-12


def test_measure_identity_all_families():
    fams = [
        identity_motion(Interval(1.0), 1.0),
        one_d_scaling(Affine(1.0, 0.5), 1.0),
        homothetic(Poly(1.0, 0.2, 0.05), Ball(1.0, 2), 1.0),
        homothetic(Affine(1.0, 0.3), Box((1.0, 0.5)), 1.0),
        homothetic(Affine(1.0, 0.2), Tetrahedron((0.6, 0.8)), 1.0),
        radial_annulus_flow(1.0, Affine(0.2, 0.1), 1.0),
        interval_flow(4.0, Affine(1.0, 0.5), 1.0),
    ]
    for fam in fams:
        assert measure_identity_residual(fam) < 1e-6
