import numpy as np
import pytest

from debondwave.domains import Ball, Interval, Tetrahedron
from debondwave.errors import GradientVanishes, LevelOutOfRange, NonPositiveScale
from debondwave.expressions import Affine, Const, Poly
from debondwave.motion import (
    LevelFunction,
    SublevelFlowMotion,
    boundary_kinematics,
    homothetic,
    identity_motion,
    interval_flow,
    one_d_scaling,
    radial_annulus_flow,
    validate,
)

SQ2 = np.sqrt(2.0)


# --- jets -----------------------------------------------------------------


def test_identity_jet_is_trivial():
    fam = identity_motion(Interval(1.0), 1.0)
    j = fam.jet(0.7, 0.3)
    assert np.allclose(j.dphi, np.eye(1))
    assert np.allclose(j.phi_dot, 0.0)
    assert j.det_dphi == 1.0
    assert np.allclose(j.psi_dot_at_phi, 0.0)


def test_scaling_jet_hand_values():
    # l(t) = 1 + t/2 at (t, y) = (1, 0.5): all fields known in closed form
    fam = one_d_scaling(Affine(1.0, 0.5), 1.0)
    j = fam.jet(1.0, 0.5)
    assert abs(j.phi[0] - 0.75) < 1e-14
    assert abs(j.dphi[0, 0] - 1.5) < 1e-14
    assert abs(j.det_dphi - 1.5) < 1e-14
    assert abs(j.phi_dot[0] - 0.25) < 1e-14
    assert abs(j.dpsi_at_phi[0, 0] - 2.0 / 3.0) < 1e-14
    assert abs(j.psi_dot_at_phi[0] + 1.0 / 6.0) < 1e-14


def test_homothetic_det_is_lambda_power():
    for dim in (2, 3):
        fam = homothetic(Affine(1.0, 0.25), Ball(1.0, dim), 1.0)
        Y = fam.reference.interior_grid(20)
        lam = 1.0 + 0.25 * 0.8
        assert np.allclose(fam.det_dphi(0.8, Y), lam ** dim, rtol=1e-14)


# --- hypothesis validation ---------------------------------------------------


def test_validate_identity_zero_residuals():
    rep = validate(identity_motion(Interval(1.0), 1.0), nt=6, npts=8)
    assert rep.max_residual() < 1e-12
    assert rep.max_phi_dot == 0.0
    assert rep.h1_ok and rep.h2_ok


def test_validate_scaling_analytic_tolerance():
    rep = validate(one_d_scaling(Affine(1.0, 0.5), 1.0), nt=12, npts=12)
    assert rep.max_residual() < 1e-9
    assert abs(rep.max_phi_dot - 0.5) < 1e-12
    assert rep.h2_ok


def test_validate_detects_supersonic_growth():
    rep = validate(one_d_scaling(Affine(1.0, 1.2), 1.0), nt=6, npts=6)
    assert abs(rep.max_phi_dot - 1.2) < 1e-12
    assert not rep.h2_ok


def test_validate_sublevel_within_flow_tolerance():
    fam = radial_annulus_flow(1.0, Affine(0.2, 0.1), 1.0)
    rep = validate(fam, nt=10, npts=12)
    assert rep.max_residual() < 1e-6
    assert rep.min_det_dphi > 0
    assert rep.h2_ok


# --- boundary kinematics -----------------------------------------------------


def test_omega_endpoints_1d():
    fam = one_d_scaling(Affine(1.0, 0.5), 1.0)
    left, right = boundary_kinematics(fam, 0.7)
    assert abs(left.omega[0]) < 1e-14
    assert abs(right.omega[0] - 0.5) < 1e-14
    # space-time normal has unit length and the stated time component
    assert abs(np.linalg.norm(right.nu_spacetime[0]) - 1.0) < 1e-14


def test_omega_homothetic_ball_and_tetrahedron():
    lam = Poly(1.0, 0.2, 0.05)
    ball = homothetic(lam, Ball(1.0, 2), 1.0)
    t = 0.5
    expect = 0.2 + 0.1 * t
    for fk in boundary_kinematics(ball, t, resolution=16):
        assert np.allclose(fk.omega, expect, atol=1e-12)
    tetra = homothetic(Affine(1.0, 0.2), Tetrahedron((0.6, 0.8)), 1.0)
    faces = {fk.name: fk for fk in boundary_kinematics(tetra, t, resolution=12)}
    assert np.allclose(faces["y1=0"].omega, 0.0, atol=1e-13)
    assert np.allclose(faces["y2=0"].omega, 0.0, atol=1e-13)
    assert np.allclose(faces["slant"].omega, 0.2, atol=1e-12)


def test_omega_nonnegative_and_subsonic_random_profiles():
    rng = np.random.default_rng(7)
    for _ in range(10):
        prof = Poly(1.0, rng.uniform(0.0, 0.8), rng.uniform(0.0, 0.1))
        fam = one_d_scaling(prof, 1.0)
        assert fam.is_nondecreasing()
        for t in np.linspace(0.0, 1.0, 5):
            for fk in boundary_kinematics(fam, t):
                assert np.all(fk.omega >= -1e-13)
                assert np.all(np.abs(fk.omega) < 1.0)


def test_omega_independent_of_the_diffeomorphism():
    prof = Affine(1.0, 0.5)
    f1 = one_d_scaling(prof, 1.0)
    f2 = interval_flow(4.0, prof, 1.0)
    for t in np.linspace(0.0, 1.0, 9):
        for a, b in zip(boundary_kinematics(f1, t), boundary_kinematics(f2, t)):
            assert np.max(np.abs(a.omega - b.omega)) < 1e-6
            assert np.max(np.abs(a.x - b.x)) < 1e-6


# --- sublevel specifics -------------------------------------------------------


def test_level_identity_example():
    fam = radial_annulus_flow(1.0, Affine(0.2, 0.1), 1.0)
    y = np.array([[0.9, 0.0]])
    x = fam.phi(1.0, y)
    assert abs(np.linalg.norm(x[0]) - 0.85) < 1e-8
    assert fam.level_identity_residual(1.0, y) < 1e-8
    assert fam.level_identity_residual(0.0, y) < 1e-13


def test_level_identity_stationary_profile():
    fam = radial_annulus_flow(1.0, Const(0.2), 1.0)
    Y = fam.reference.interior_grid(12)
    assert np.max(np.abs(fam.phi(0.7, Y) - Y)) < 1e-12
    assert fam.level_identity_residual(0.7, Y) < 1e-12


def test_speed_condition_margins():
    fam = radial_annulus_flow(1.0, Affine(0.2, 0.1), 1.0)
    assert abs(fam.speed_condition_margin() - 0.9) < 1e-9
    const = radial_annulus_flow(1.0, Const(0.2), 1.0)
    assert abs(const.speed_condition_margin() - 1.0) < 1e-9  # min |grad g| = 1
    fast = radial_annulus_flow(4.0, Affine(0.2, 1.5), 1.0)
    assert abs(fast.speed_condition_margin() + 0.5) < 1e-9


def test_builder_guards():
    with pytest.raises(NonPositiveScale):
        one_d_scaling(Affine(1.0, -2.0), 1.0)
    with pytest.raises(LevelOutOfRange):
        radial_annulus_flow(1.0, Affine(0.5, 0.6), 1.0)
    with pytest.raises(ValueError):
        homothetic(Affine(1.1, 0.1), Ball(1.0, 2), 1.0)  # lam(0) != 1

    class FlatLevel(LevelFunction):
        gkind = 0

        def __init__(self):
            self.dim = 2
            self.cvec = np.zeros(2)
            self.dshift = 0.0

        def value(self, X):
            return np.linalg.norm(X, axis=1)

        def grad(self, X):
            return np.zeros_like(X)

        def hess(self, X):
            return np.zeros((len(X), 2, 2))

    with pytest.raises(GradientVanishes):
        SublevelFlowMotion(FlatLevel(), 1.0, Affine(0.2, 0.1), 1.0)


def test_sublevel_flow_matches_closed_form_map():
    # radial flow has the closed form r -> R + (rho/rho0)(r0 - R)
    fam = radial_annulus_flow(1.0, Affine(0.2, 0.1), 1.0)
    Y = fam.reference.interior_grid(24)
    t = 0.8
    got = fam.phi(t, Y)
    r0 = np.linalg.norm(Y, axis=1)
    scale = (0.2 + 0.1 * t) / 0.2
    expect = (1.0 + scale * (r0 - 1.0))[:, None] * Y / r0[:, None]
    assert np.max(np.abs(got - expect)) < 1e-9
