"""Moving-domain families described by diffeomorphisms.

A family maps a fixed reference domain onto the moving one through
Phi(t, .), with inverse Psi(t, .).  Four kinds are built in:

    Identity        Phi(t, y) = y
    OneDScaling     Phi(t, y) = l(t) y / l(0) on an interval
    Homothetic      Phi(t, y) = lam(t) y, lam(0) = 1
    SublevelFlow    Phi integrates  x' = (rho'/rho)(g(x) - R) grad g/|grad g|^2,
                    so that Omega_t = { R - rho(t) < g < R }

The analytic kinds carry closed-form jets.  SublevelFlow integrates the
point flow together with the variational (matrix) ODE for DPhi by fixed
step RK4; the step count is calibrated at build time so that halving the
steps moves det DPhi by less than 1e-8.  Psi for SublevelFlow is the
backward flow, reusing the same integrator.

Jet conventions: the composed fields DPsi(t, Phi) and dPsi/dt(t, Phi)
inside a jet use the exact algebraic relations (matrix inverse and
-DPsi Phi_dot); the *direct* Psi-side evaluators (psi, dpsi, det_dpsi,
psi_dot) are kept independent so that identity validation is not
circular.  Tolerances are split: 1e-9 for analytic kinds (round-off),
1e-6 for flow-integrated ones (integrator truncation).
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .domains import Annulus, Interval, ReferenceDomain
from .errors import (
    DegenerateNormal,
    FlowEscape,
    GradientVanishes,
    LevelOutOfRange,
    NonPositiveScale,
)
from .expressions import Affine, Const, Expression, Poly

ANALYTIC_TOL = 1.0e-9
FLOW_TOL = 1.0e-6


def _as_points(Y, dim):
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 0:
        Y = Y.reshape(1, 1)
    elif Y.ndim == 1:
        Y = Y.reshape(-1, 1) if dim == 1 else Y.reshape(1, -1)
    if Y.shape[1] != dim:
        raise ValueError(f"points have dimension {Y.shape[1]}, family has {dim}")
    return Y


def _profile_coeffs(profile):
    """Ascending polynomial coefficients of a catalog profile."""
    if isinstance(profile, Const):
        return np.array([profile.c])
    if isinstance(profile, Affine):
        return np.array([profile.a, profile.b])
    if isinstance(profile, Poly):
        return np.array(profile.coeffs, dtype=float)
    raise TypeError("motion profiles must be Const, Affine or Poly expressions")


@dataclass
class MotionJet:
    """All first-order data of the maps at one reference point."""

    phi: np.ndarray
    phi_dot: np.ndarray
    phi_ddot: np.ndarray
    dphi: np.ndarray
    dphi_dt: np.ndarray
    grad_det_dphi: np.ndarray
    det_dphi_dt: float
    dpsi_at_phi: np.ndarray
    psi_dot_at_phi: np.ndarray
    det_dphi: float

    def check(self, tol):
        if self.det_dphi <= 0:
            raise FlowEscape(f"det DPhi = {self.det_dphi} is not positive")
        gap = np.max(np.abs(self.dpsi_at_phi @ self.dphi - np.eye(self.dphi.shape[0])))
        if gap > tol:
            raise FlowEscape(f"DPsi DPhi deviates from identity by {gap}")


class MotionFamily:
    """Base class for the built-in families."""

    kind = "abstract"

    def __init__(self, reference: ReferenceDomain, horizon: float, tol: float):
        if horizon <= 0:
            raise ValueError("horizon must be positive")
        self.reference = reference
        self.horizon = float(horizon)
        self.tol = float(tol)
        self.dim = reference.dim
        # finite-difference steps for validation-side derivatives
        self._eps_t = 5.0e-6 * max(1.0, self.horizon)
        self._eps_x = 5.0e-6

    # forward side -------------------------------------------------------
    def phi(self, t, Y):
        raise NotImplementedError

    def phi_dot(self, t, Y):
        raise NotImplementedError

    def phi_ddot(self, t, Y):
        raise NotImplementedError

    def dphi(self, t, Y):
        raise NotImplementedError

    def dphi_dt(self, t, Y):
        raise NotImplementedError

    def det_dphi(self, t, Y):
        raise NotImplementedError

    def det_dphi_dt(self, t, Y):
        raise NotImplementedError

    def grad_det_dphi(self, t, Y):
        raise NotImplementedError

    # composed fields used by jets and coefficients ------------------------
    def dpsi_at_phi(self, t, Y):
        raise NotImplementedError

    def psi_dot_at_phi(self, t, Y):
        """Psi_dot(t, Phi(t, y)) = -DPsi(t, Phi) Phi_dot(t, y)."""
        K = self.dpsi_at_phi(t, Y)
        pd = self.phi_dot(t, Y)
        return -np.einsum("pij,pj->pi", K, pd)

    # independent inverse side (validation) --------------------------------
    def psi(self, t, X):
        raise NotImplementedError

    def dpsi(self, t, X):
        raise NotImplementedError

    def det_dpsi(self, t, X):
        return np.linalg.det(self.dpsi(t, X))

    def psi_dot(self, t, X):
        """Direct time derivative of Psi at fixed x, by central differences."""
        eps = self._eps_t
        return (self.psi(t + eps, X) - self.psi(t - eps, X)) / (2.0 * eps)

    # derived --------------------------------------------------------------
    def jet(self, t, y):
        """Full jet at a single reference point (spec values, checked)."""
        Y = _as_points(y, self.dim)
        j = MotionJet(
            phi=self.phi(t, Y)[0],
            phi_dot=self.phi_dot(t, Y)[0],
            phi_ddot=self.phi_ddot(t, Y)[0],
            dphi=self.dphi(t, Y)[0],
            dphi_dt=self.dphi_dt(t, Y)[0],
            grad_det_dphi=self.grad_det_dphi(t, Y)[0],
            det_dphi_dt=float(self.det_dphi_dt(t, Y)[0]),
            dpsi_at_phi=self.dpsi_at_phi(t, Y)[0],
            psi_dot_at_phi=self.psi_dot_at_phi(t, Y)[0],
            det_dphi=float(self.det_dphi(t, Y)[0]),
        )
        j.check(max(self.tol, 1e-6))
        return j

    def domain_measure(self, t):
        raise NotImplementedError

    def is_nondecreasing(self, samples=200):
        raise NotImplementedError

    def max_boundary_speed(self):
        """Supremum of |Phi_dot| over [0, T] x closure(reference), sampled."""
        ts = np.linspace(0.0, self.horizon, 41)
        Y = self.reference.interior_grid(64)
        best = 0.0
        for t in ts:
            best = max(best, float(np.max(np.linalg.norm(self.phi_dot(t, Y), axis=1))))
        return best


# --- analytic kinds -------------------------------------------------------


class IdentityMotion(MotionFamily):
    kind = "identity"

    def phi(self, t, Y):
        return _as_points(Y, self.dim).copy()

    def phi_dot(self, t, Y):
        return np.zeros_like(_as_points(Y, self.dim))

    phi_ddot = phi_dot

    def dphi(self, t, Y):
        Y = _as_points(Y, self.dim)
        return np.tile(np.eye(self.dim), (len(Y), 1, 1))

    def dphi_dt(self, t, Y):
        Y = _as_points(Y, self.dim)
        return np.zeros((len(Y), self.dim, self.dim))

    def det_dphi(self, t, Y):
        return np.ones(len(_as_points(Y, self.dim)))

    def det_dphi_dt(self, t, Y):
        return np.zeros(len(_as_points(Y, self.dim)))

    def grad_det_dphi(self, t, Y):
        return np.zeros_like(_as_points(Y, self.dim))

    def dpsi_at_phi(self, t, Y):
        return self.dphi(t, Y)

    def psi(self, t, X):
        return _as_points(X, self.dim).copy()

    def dpsi(self, t, X):
        return self.dphi(t, X)

    def psi_dot(self, t, X):
        return np.zeros_like(_as_points(X, self.dim))

    def domain_measure(self, t):
        return self.reference.measure()

    def is_nondecreasing(self, samples=200):
        return True


class OneDScalingMotion(MotionFamily):
    """Interval (0, l(0)) stretched to (0, l(t))."""

    kind = "one_d_scaling"

    def __init__(self, profile: Expression, horizon, tol=ANALYTIC_TOL):
        self.profile = profile
        l0 = float(profile(0.0))
        _check_positive_profile(profile, horizon, "l")
        super().__init__(Interval(l0), horizon, tol)
        self.l0 = l0

    def _l(self, t):
        return float(self.profile(t))

    def phi(self, t, Y):
        return _as_points(Y, 1) * (self._l(t) / self.l0)

    def phi_dot(self, t, Y):
        return _as_points(Y, 1) * (float(self.profile.deriv(t)) / self.l0)

    def phi_ddot(self, t, Y):
        return _as_points(Y, 1) * (float(self.profile.deriv2(t)) / self.l0)

    def dphi(self, t, Y):
        Y = _as_points(Y, 1)
        return np.full((len(Y), 1, 1), self._l(t) / self.l0)

    def dphi_dt(self, t, Y):
        Y = _as_points(Y, 1)
        return np.full((len(Y), 1, 1), float(self.profile.deriv(t)) / self.l0)

    def det_dphi(self, t, Y):
        return np.full(len(_as_points(Y, 1)), self._l(t) / self.l0)

    def det_dphi_dt(self, t, Y):
        return np.full(len(_as_points(Y, 1)), float(self.profile.deriv(t)) / self.l0)

    def grad_det_dphi(self, t, Y):
        return np.zeros_like(_as_points(Y, 1))

    def dpsi_at_phi(self, t, Y):
        Y = _as_points(Y, 1)
        return np.full((len(Y), 1, 1), self.l0 / self._l(t))

    def psi(self, t, X):
        return _as_points(X, 1) * (self.l0 / self._l(t))

    def dpsi(self, t, X):
        X = _as_points(X, 1)
        return np.full((len(X), 1, 1), self.l0 / self._l(t))

    def psi_dot(self, t, X):
        X = _as_points(X, 1)
        l = self._l(t)
        return -self.l0 * float(self.profile.deriv(t)) * X / (l * l)

    def domain_measure(self, t):
        return self._l(t)

    def is_nondecreasing(self, samples=200):
        ts = np.linspace(0.0, self.horizon, samples)
        return bool(np.all(self.profile.deriv(ts) >= -1e-12))


class HomotheticMotion(MotionFamily):
    """Phi(t, y) = lam(t) y with lam(0) = 1 on any reference domain."""

    kind = "homothetic"

    def __init__(self, profile: Expression, reference: ReferenceDomain, horizon, tol=ANALYTIC_TOL):
        if abs(float(profile(0.0)) - 1.0) > 1e-12:
            raise ValueError("homothety profile must satisfy lam(0) = 1")
        _check_positive_profile(profile, horizon, "lam")
        super().__init__(reference, horizon, tol)
        self.profile = profile

    def _lam(self, t):
        return float(self.profile(t))

    def phi(self, t, Y):
        return _as_points(Y, self.dim) * self._lam(t)

    def phi_dot(self, t, Y):
        return _as_points(Y, self.dim) * float(self.profile.deriv(t))

    def phi_ddot(self, t, Y):
        return _as_points(Y, self.dim) * float(self.profile.deriv2(t))

    def dphi(self, t, Y):
        Y = _as_points(Y, self.dim)
        return np.tile(self._lam(t) * np.eye(self.dim), (len(Y), 1, 1))

    def dphi_dt(self, t, Y):
        Y = _as_points(Y, self.dim)
        return np.tile(float(self.profile.deriv(t)) * np.eye(self.dim), (len(Y), 1, 1))

    def det_dphi(self, t, Y):
        return np.full(len(_as_points(Y, self.dim)), self._lam(t) ** self.dim)

    def det_dphi_dt(self, t, Y):
        lam = self._lam(t)
        return np.full(
            len(_as_points(Y, self.dim)),
            self.dim * lam ** (self.dim - 1) * float(self.profile.deriv(t)),
        )

    def grad_det_dphi(self, t, Y):
        return np.zeros_like(_as_points(Y, self.dim))

    def dpsi_at_phi(self, t, Y):
        Y = _as_points(Y, self.dim)
        return np.tile(np.eye(self.dim) / self._lam(t), (len(Y), 1, 1))

    def psi(self, t, X):
        return _as_points(X, self.dim) / self._lam(t)

    def dpsi(self, t, X):
        X = _as_points(X, self.dim)
        return np.tile(np.eye(self.dim) / self._lam(t), (len(X), 1, 1))

    def psi_dot(self, t, X):
        lam = self._lam(t)
        return -float(self.profile.deriv(t)) * _as_points(X, self.dim) / (lam * lam)

    def domain_measure(self, t):
        return self._lam(t) ** self.dim * self.reference.measure()

    def is_nondecreasing(self, samples=200):
        ts = np.linspace(0.0, self.horizon, samples)
        return bool(np.all(self.profile.deriv(ts) >= -1e-12))


# --- sublevel flow --------------------------------------------------------


class LevelFunction:
    """Scalar field g with gradient and Hessian, plus kernel parameters."""

    gkind = None

    def value(self, X):
        raise NotImplementedError

    def grad(self, X):
        raise NotImplementedError

    def hess(self, X):
        raise NotImplementedError


class RadialLevel(LevelFunction):
    """g(x) = |x|."""

    gkind = kernels.GKIND_RADIAL

    def __init__(self, dim=2):
        self.dim = dim
        self.cvec = np.zeros(dim)
        self.dshift = 0.0

    def value(self, X):
        return np.linalg.norm(X, axis=1)

    def grad(self, X):
        r = np.linalg.norm(X, axis=1, keepdims=True)
        return X / r

    def hess(self, X):
        r = np.linalg.norm(X, axis=1)
        n = X.shape[1]
        eye = np.eye(n)[None, :, :]
        xh = X / r[:, None]
        return (eye - xh[:, :, None] * xh[:, None, :]) / r[:, None, None]


class ReflectedLevel(LevelFunction):
    """g(x) = R - x on the line; sublevel families then live on (0, rho(t))."""

    gkind = kernels.GKIND_LINEAR

    def __init__(self, R):
        self.dim = 1
        self.R = float(R)
        self.cvec = np.array([-1.0])
        self.dshift = float(R)

    def value(self, X):
        return self.dshift - X[:, 0]

    def grad(self, X):
        return np.full_like(X, -1.0)

    def hess(self, X):
        return np.zeros((len(X), 1, 1))


class SublevelFlowMotion(MotionFamily):
    """Omega_t = { R - rho(t) < g < R }, transported by the level-set flow."""

    kind = "sublevel_flow"

    def __init__(self, level: LevelFunction, R, profile: Expression, horizon,
                 tol=FLOW_TOL, det_target=1.0e-8):
        self.level = level
        self.R = float(R)
        self.profile = profile
        pad = 1.0e-2 * max(1.0, horizon)
        ts = np.linspace(-pad, horizon + pad, 400)
        rho = np.asarray(profile(ts), dtype=float)
        if np.any(rho <= 0):
            raise NonPositiveScale("rho must stay positive on the (padded) horizon")
        if np.any(rho >= self.R):
            raise LevelOutOfRange("rho(t) must stay below the outer level R")
        rho0 = float(profile(0.0))
        if level.gkind == kernels.GKIND_RADIAL:
            reference = Annulus(self.R - rho0, self.R, level.dim)
        else:
            reference = Interval(rho0)
        super().__init__(reference, horizon, tol)
        self._eps_x = 3.0e-4 * max(1.0, self.R)
        self._eps_t = 3.0e-4 * max(1.0, horizon)
        self.rho_c = _profile_coeffs(profile)
        self.drho_c = np.polynomial.polynomial.polyder(self.rho_c) if len(self.rho_c) > 1 else np.zeros(1)
        grid = reference.interior_grid(64)
        gn = np.linalg.norm(level.grad(grid), axis=1)
        if np.any(gn < 1e-12):
            raise GradientVanishes("grad g vanishes at a sampled reference point")
        self.steps_per_unit = self._calibrate(det_target)

    # flow plumbing --------------------------------------------------------
    def _nsteps(self, t0, t1):
        return max(16, int(math.ceil(abs(t1 - t0) * self.steps_per_unit)))

    def _flow(self, Y, t0, t1, with_jac=True, nsteps=None):
        if nsteps is None:
            nsteps = self._nsteps(t0, t1)
        x, J = kernels.flow_map(
            Y, t0, t1, nsteps, self.level.gkind, self.R,
            self.level.cvec, self.level.dshift, self.rho_c, self.drho_c,
            with_jac=with_jac,
        )
        if not np.all(np.isfinite(x)):
            raise FlowEscape("sublevel flow produced non-finite points")
        g = self.level.value(x)
        if np.any(g <= 1e-3 * self.R):
            raise FlowEscape("sublevel flow left the region where g is usable")
        return x, J

    def _calibrate(self, det_target):
        probe = self.reference.interior_grid(16)
        steps = max(32, int(32 * max(1.0, self.horizon)))
        for _ in range(12):
            _, J1 = self._flow(probe, 0.0, self.horizon, nsteps=steps)
            _, J2 = self._flow(probe, 0.0, self.horizon, nsteps=2 * steps)
            gap = np.max(np.abs(np.linalg.det(J1) - np.linalg.det(J2)))
            if gap < det_target:
                break
            steps *= 2
        return max(16.0, 2.0 * steps / max(self.horizon, 1e-12))

    def _field(self, t, X):
        """Vector field and its Jacobian at physical points."""
        s = float(self.profile.deriv(t)) / float(self.profile(t))
        g = self.level.value(X)
        G = self.level.grad(X)
        G2 = np.sum(G * G, axis=1)
        base = G / G2[:, None]
        Xf = s * (g - self.R)[:, None] * base
        H = self.level.hess(X)
        HG = np.einsum("pij,pj->pi", H, G)
        Dbase = H / G2[:, None, None] - 2.0 * base[:, :, None] * HG[:, None, :] / G2[:, None, None]
        DX = s * (base[:, :, None] * G[:, None, :] + (g - self.R)[:, None, None] * Dbase)
        return Xf, DX

    # forward side ---------------------------------------------------------
    def phi(self, t, Y):
        Y = _as_points(Y, self.dim)
        x, _ = self._flow(Y, 0.0, t, with_jac=False)
        return x

    def dphi(self, t, Y):
        Y = _as_points(Y, self.dim)
        _, J = self._flow(Y, 0.0, t)
        return J

    def _phi_and_dphi(self, t, Y):
        Y = _as_points(Y, self.dim)
        return self._flow(Y, 0.0, t)

    def phi_dot(self, t, Y):
        x = self.phi(t, Y)
        Xf, _ = self._field(t, x)
        return Xf

    def phi_ddot(self, t, Y):
        x = self.phi(t, Y)
        Xf, DX = self._field(t, x)
        rho = float(self.profile(t))
        dr = float(self.profile.deriv(t))
        ddr = float(self.profile.deriv2(t))
        s = dr / rho
        sdot = ddr / rho - s * s
        # X = s(t) F(x); Xdot = (sdot/s) X when s != 0, else sdot F(x)
        g = self.level.value(x)
        G = self.level.grad(x)
        G2 = np.sum(G * G, axis=1)
        F = (g - self.R)[:, None] * G / G2[:, None]
        Xdot = sdot * F
        return Xdot + np.einsum("pij,pj->pi", DX, Xf)

    def dphi_dt(self, t, Y):
        x, J = self._phi_and_dphi(t, Y)
        _, DX = self._field(t, x)
        return np.einsum("pij,pjk->pik", DX, J)

    def det_dphi(self, t, Y):
        return np.linalg.det(self.dphi(t, Y))

    def det_dphi_dt(self, t, Y):
        x, J = self._phi_and_dphi(t, Y)
        _, DX = self._field(t, x)
        trace = np.einsum("pii->p", DX)
        return np.linalg.det(J) * trace

    def grad_det_dphi(self, t, Y):
        Y = _as_points(Y, self.dim)
        eps = self._eps_x
        out = np.zeros_like(Y)
        for k in range(self.dim):
            e = np.zeros(self.dim)
            e[k] = eps
            dp = self.det_dphi(t, Y + e)
            dm = self.det_dphi(t, Y - e)
            out[:, k] = (dp - dm) / (2.0 * eps)
        return out

    def dpsi_at_phi(self, t, Y):
        return np.linalg.inv(self.dphi(t, Y))

    # independent inverse side ----------------------------------------------
    def psi(self, t, X):
        X = _as_points(X, self.dim)
        y, _ = self._flow(X, t, 0.0, with_jac=False)
        return y

    def dpsi(self, t, X):
        X = _as_points(X, self.dim)
        _, J = self._flow(X, t, 0.0)
        return J

    def domain_measure(self, t):
        rho = float(self.profile(t))
        if self.level.gkind == kernels.GKIND_RADIAL:
            n = self.dim
            vn = math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)
            return vn * (self.R ** n - (self.R - rho) ** n)
        return rho

    def is_nondecreasing(self, samples=200):
        ts = np.linspace(0.0, self.horizon, samples)
        return bool(np.all(self.profile.deriv(ts) >= -1e-12))

    # sublevel-specific checks ----------------------------------------------
    def level_identity_residual(self, t, y):
        """| g(Phi(t,y)) - R - (rho(t)/rho(0)) (g(y) - R) |."""
        Y = _as_points(y, self.dim)
        x = self.phi(t, Y)
        lhs = self.level.value(x) - self.R
        rhs = (float(self.profile(t)) / float(self.profile(0.0))) * (self.level.value(Y) - self.R)
        return float(np.max(np.abs(lhs - rhs)))

    def speed_condition_margin(self, nt=41, npts=200):
        """min over samples of |grad g| - rho'(t); positive margin certifies H2."""
        ts = np.linspace(0.0, self.horizon, nt)
        Y = self.reference.interior_grid(npts)
        margin = np.inf
        for t in ts:
            x = self.phi(t, Y)
            gn = np.linalg.norm(self.level.grad(x), axis=1)
            margin = min(margin, float(np.min(gn) - float(self.profile.deriv(t))))
        return margin


def _check_positive_profile(profile, horizon, name):
    pad = 1.0e-2 * max(1.0, horizon)
    ts = np.linspace(-pad, horizon + pad, 400)
    vals = np.asarray(profile(ts), dtype=float)
    if np.any(vals <= 0):
        raise NonPositiveScale(f"{name}(t) must stay positive on the horizon")


# --- constructors ---------------------------------------------------------


def identity_motion(reference, horizon, tol=ANALYTIC_TOL):
    return IdentityMotion(reference, horizon, tol)


def one_d_scaling(profile, horizon, tol=ANALYTIC_TOL):
    return OneDScalingMotion(profile, horizon, tol)


def homothetic(profile, reference, horizon, tol=ANALYTIC_TOL):
    return HomotheticMotion(profile, reference, horizon, tol)


def sublevel_flow(level, R, profile, horizon, tol=FLOW_TOL):
    return SublevelFlowMotion(level, R, profile, horizon, tol)


def radial_annulus_flow(R, profile, horizon, dim=2, tol=FLOW_TOL):
    """Annuli { R - rho(t) < |x| < R }."""
    return SublevelFlowMotion(RadialLevel(dim), R, profile, horizon, tol)


def interval_flow(R, profile, horizon, tol=FLOW_TOL):
    """Intervals (0, rho(t)) realized as sublevel sets of g(x) = R - x."""
    return SublevelFlowMotion(ReflectedLevel(R), R, profile, horizon, tol)


# --- boundary kinematics --------------------------------------------------


@dataclass
class FaceKinematics:
    """Boundary samples of one face pushed to the moving domain at time t."""

    name: str
    y: np.ndarray         # reference points (Q, N)
    x: np.ndarray         # physical points (Q, N)
    nu: np.ndarray        # outward unit normal of Omega_t (Q, N)
    nu_spacetime: np.ndarray  # (Q, N+1) space-time outward normal, (t, x) order
    omega: np.ndarray     # scalar normal velocity (Q,)
    weights: np.ndarray   # physical surface-measure quadrature weights (Q,)


def boundary_kinematics(fam, t, resolution=64, faces=None):
    """Normals, space-time normals and scalar normal velocity per face.

    nu is the pushforward DPsi^T nu0 / |DPsi^T nu0|; omega = Phi_dot . nu;
    the space-time normal is (-omega, nu) normalized.  Physical quadrature
    weights carry the surface Jacobian det DPhi |DPsi^T nu0|.
    """
    if faces is None:
        faces = fam.reference.boundary_faces(resolution)
    out = []
    for face in faces:
        Y = face.points
        K = fam.dpsi_at_phi(t, Y)
        raw = np.einsum("pji,pj->pi", K, face.normals)  # K^T nu0
        norms = np.linalg.norm(raw, axis=1)
        if np.any(norms < 1e-14):
            raise DegenerateNormal(f"normal pushforward degenerate on face {face.name}")
        nu = raw / norms[:, None]
        x = fam.phi(t, Y)
        pd = fam.phi_dot(t, Y)
        omega = np.sum(pd * nu, axis=1)
        denom = np.sqrt(1.0 + omega ** 2)
        nu_st = np.concatenate([(-omega / denom)[:, None], nu / denom[:, None]], axis=1)
        # consistency of the two omega formulas (algebraic, asserted)
        omega_alt = -nu_st[:, 0] / np.linalg.norm(nu_st[:, 1:], axis=1)
        if np.max(np.abs(omega - omega_alt)) > 1e-9 * (1.0 + np.max(np.abs(omega))):
            raise DegenerateNormal("omega mismatch between definitions")
        w_phys = face.weights * fam.det_dphi(t, Y) * norms
        out.append(FaceKinematics(face.name, Y, x, nu, nu_st, omega, w_phys))
    return out


def boundary_flux(fam, t, values=None, resolution=64):
    """Integral over the moving boundary of omega * values(x)."""
    total = 0.0
    for fk in boundary_kinematics(fam, t, resolution):
        vals = 1.0 if values is None else values(fk.x)
        total += float(np.sum(fk.weights * fk.omega * vals))
    return total


# --- hypothesis validation -------------------------------------------------


@dataclass
class RegularityReport:
    """Residuals of the seven map identities plus hypothesis verdicts."""

    residuals: dict
    max_phi_dot: float
    min_det_dphi: float
    second_diff_bound: float
    tol: float
    h1_ok: bool
    h1prime_ok: bool
    h2_ok: bool

    def max_residual(self):
        return max(self.residuals.values())


def validate(fam, nt=20, npts=20):
    """Check the seven map identities and hypotheses H1/H1'/H2 on a grid.

    Violations are reported, never raised.  The Psi-side quantities come
    from the independent inverse evaluators (closed forms for analytic
    kinds, backward flows otherwise), so the residuals are meaningful.
    """
    ts = np.linspace(0.0, fam.horizon, nt)
    Y = fam.reference.interior_grid(npts)
    names = ("dpsi_dphi", "det_product", "psi_dot", "grad_det", "det_dt", "mixed", "divergence")
    res = {n: 0.0 for n in names}
    max_pd = 0.0
    min_det = np.inf
    second = 0.0
    eye = np.eye(fam.dim)
    eps_x = fam._eps_x
    eps_t = fam._eps_t

    for t in ts:
        X = fam.phi(t, Y)
        J = fam.dphi(t, Y)
        detJ = fam.det_dphi(t, Y)
        pd = fam.phi_dot(t, Y)
        gdJ = fam.grad_det_dphi(t, Y)
        dJt = fam.det_dphi_dt(t, Y)
        K = fam.dpsi(t, X)
        dK = fam.det_dpsi(t, X)
        psd = fam.psi_dot(t, X)

        min_det = min(min_det, float(np.min(detJ)))
        max_pd = max(max_pd, float(np.max(np.linalg.norm(pd, axis=1))))

        res["dpsi_dphi"] = max(res["dpsi_dphi"], float(np.max(np.abs(
            np.einsum("pij,pjk->pik", K, J) - eye[None]))))
        res["det_product"] = max(res["det_product"], float(np.max(np.abs(dK * detJ - 1.0))))
        res["psi_dot"] = max(res["psi_dot"], float(np.max(np.abs(
            psd + np.einsum("pij,pj->pi", K, pd)))))

        # x and t derivatives of det DPsi, by differences of the direct evaluator
        gdK = np.zeros_like(X)
        for k in range(fam.dim):
            e = np.zeros(fam.dim)
            e[k] = eps_x
            gdK[:, k] = (fam.det_dpsi(t, X + e) - fam.det_dpsi(t, X - e)) / (2.0 * eps_x)
        dKt = (fam.det_dpsi(t + eps_t, X) - fam.det_dpsi(t - eps_t, X)) / (2.0 * eps_t)

        res["grad_det"] = max(res["grad_det"], float(np.max(np.abs(
            gdK * detJ[:, None] + dK[:, None] * np.einsum("pji,pj->pi", K, gdJ)))))
        res["det_dt"] = max(res["det_dt"], float(np.max(np.abs(
            (dKt + np.sum(gdK * pd, axis=1)) * detJ + dK * dJt))))
        res["mixed"] = max(res["mixed"], float(np.max(np.abs(
            np.sum(gdK * pd, axis=1) * detJ - np.sum(psd * gdJ, axis=1) * dK))))

        # divergence identity from the jet fields, central differences in y
        div = np.zeros(len(Y))
        for k in range(fam.dim):
            e = np.zeros(fam.dim)
            e[k] = eps_x
            fp = fam.psi_dot_at_phi(t, Y + e) * fam.det_dphi(t, Y + e)[:, None]
            fm = fam.psi_dot_at_phi(t, Y - e) * fam.det_dphi(t, Y - e)[:, None]
            div += (fp[:, k] - fm[:, k]) / (2.0 * eps_x)
        res["divergence"] = max(res["divergence"], float(np.max(np.abs(dJt + div))))

        # H1' surrogate: bounded second differences of first-derivative jets
        eps2 = max(1.0e-5 * max(1.0, fam.horizon), eps_t)
        d2 = (fam.phi_dot(t + eps2, Y) - 2.0 * pd + fam.phi_dot(t - eps2, Y)) / eps2 ** 2
        second = max(second, float(np.max(np.abs(d2))))

    tol = fam.tol
    return RegularityReport(
        residuals=res,
        max_phi_dot=max_pd,
        min_det_dphi=min_det,
        second_diff_bound=second,
        tol=tol,
        h1_ok=(max(res.values()) <= max(10 * tol, 1e-6) and min_det > 0),
        h1prime_ok=bool(np.isfinite(second)),
        h2_ok=max_pd < 1.0,
    )
