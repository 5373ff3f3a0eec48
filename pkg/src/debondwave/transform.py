"""Pullback of the moving-domain wave equation onto the reference domain.

With K = DPsi(t, Phi) and w = Psi_dot(t, Phi), the fixed-domain problem

    v'' - div(B grad v) + a . grad v - 2 b . grad v' = g

has coefficients

    B = K K^T - w (x) w
    b = -w
    a = -( B^T grad det DPhi + d/dt [ b det DPhi ] ) / det DPhi
    g(t, y) = f(t, Phi(t, y))

and initial data v0 = u0, v1 = u1 + Phi_dot(0, .) . grad u0.  The time
derivative inside a is taken by differencing b det DPhi in t (step
1e-5 T, one-sided at the ends); everything else comes from the jets.
"""

from dataclasses import dataclass

import numpy as np

from .errors import BoundaryMismatch, NotElliptic
from .motion import MotionFamily, _as_points


@dataclass
class CoefficientSample:
    """Transformed-problem data at one (t, y)."""

    B: np.ndarray
    a: np.ndarray
    b: np.ndarray
    g: float
    at: tuple


class PulledBackProblem:
    """Vectorized coefficient evaluator for one motion family and forcing."""

    def __init__(self, fam: MotionFamily, forcing=None):
        self.fam = fam
        self.forcing = forcing
        self.dt_step = 1.0e-5 * max(fam.horizon, 1.0)

    def _b_detj(self, t, Y):
        return -self.fam.psi_dot_at_phi(t, Y) * self.fam.det_dphi(t, Y)[:, None]

    def coefficients(self, t, Y):
        """B (P,N,N), a (P,N), b (P,N), g (P,) at reference points Y."""
        fam = self.fam
        Y = _as_points(Y, fam.dim)
        K = fam.dpsi_at_phi(t, Y)
        w = fam.psi_dot_at_phi(t, Y)
        B = np.einsum("pij,pkj->pik", K, K) - w[:, :, None] * w[:, None, :]
        b = -w
        detJ = fam.det_dphi(t, Y)
        gdJ = fam.grad_det_dphi(t, Y)
        eps = self.dt_step
        if t - eps < 0.0:
            dbd = (-3.0 * self._b_detj(t, Y) + 4.0 * self._b_detj(t + eps, Y)
                   - self._b_detj(t + 2 * eps, Y)) / (2.0 * eps)
        elif t + eps > fam.horizon:
            dbd = (3.0 * self._b_detj(t, Y) - 4.0 * self._b_detj(t - eps, Y)
                   + self._b_detj(t - 2 * eps, Y)) / (2.0 * eps)
        else:
            dbd = (self._b_detj(t + eps, Y) - self._b_detj(t - eps, Y)) / (2.0 * eps)
        a = -(np.einsum("pji,pj->pi", B, gdJ) + dbd) / detJ[:, None]
        if self.forcing is None:
            g = np.zeros(len(Y))
        else:
            x = fam.phi(t, Y)
            g = np.asarray(self.forcing(t, x[:, 0] if fam.dim == 1 else x), dtype=float)
        return B, a, b, g

    def sample(self, t, y):
        B, a, b, g = self.coefficients(t, y)
        return CoefficientSample(B=B[0], a=a[0], b=b[0], g=float(g[0]), at=(t, np.atleast_1d(y)))

    def line(self, t, y):
        """1d fast path: scalar arrays (B, a, b, g) along reference points y."""
        if self.fam.dim != 1:
            raise ValueError("line() is the 1d path")
        B, a, b, g = self.coefficients(t, np.asarray(y, dtype=float).reshape(-1, 1))
        return B[:, 0, 0], a[:, 0], b[:, 0], g

    def div_b(self, t, y, eps=1.0e-6):
        """Divergence of b along a 1d line, by central differences."""
        y = np.asarray(y, dtype=float)
        _, _, bp, _ = self.line(t, y + eps)
        _, _, bm, _ = self.line(t, y - eps)
        return (bp - bm) / (2.0 * eps)


def ellipticity_constant(problem_or_fam, nt=21, npts=41, grid=None):
    """min over the sample grid of the smallest eigenvalue of B (> 0 or raise)."""
    problem = problem_or_fam
    if isinstance(problem_or_fam, MotionFamily):
        problem = PulledBackProblem(problem_or_fam)
    fam = problem.fam
    ts = np.linspace(0.0, fam.horizon, nt)
    Y = grid if grid is not None else fam.reference.interior_grid(npts)
    c = np.inf
    for t in ts:
        B, _, _, _ = problem.coefficients(t, Y)
        if fam.dim == 1:
            lam = B[:, 0, 0]
        else:
            lam = np.linalg.eigvalsh(B)[:, 0]
        c = min(c, float(np.min(lam)))
    if c <= 0.0:
        raise NotElliptic(f"min eig(B) = {c} <= 0 on the sample grid")
    return c


@dataclass
class TransformedData:
    """Initial data of the fixed-domain problem, as callables on the reference."""

    v0: object
    v0_deriv: object
    v1: object


def pullback_initial(fam, u0, u1):
    """v0 = u0 and v1 = u1 + Phi_dot(0, .) . grad u0 (1d fields)."""
    if fam.dim != 1:
        raise ValueError("pullback_initial implemented for 1d data")

    def v1(y):
        y = np.asarray(y, dtype=float)
        pd = fam.phi_dot(0.0, y.reshape(-1, 1))[:, 0]
        return np.asarray(u1(y), dtype=float) + pd * np.asarray(u0.deriv(y), dtype=float)

    return TransformedData(v0=u0, v0_deriv=u0.deriv, v1=v1)


def pushforward(fam, traj_eval, t, x):
    """Physical-space values (u, u_dot, grad u) at x, zero-extended.

    traj_eval(t, y) must return (v, v_dot, grad v) on reference points;
    the chain rules u_dot = v_dot + grad v . Psi_dot and
    grad u = DPsi^T grad v are applied at y = Psi(t, x).  The boolean
    array flags points outside Omega_t (zero extension used there).
    """
    X = _as_points(x, fam.dim)
    y = fam.psi(t, X)
    outside = _outside_reference(fam, y)
    y = np.clip(y, _reference_lo(fam), _reference_hi(fam)) if fam.dim == 1 else y
    v, vd, vy = traj_eval(t, y)
    K = fam.dpsi_at_phi(t, y)
    psd = fam.psi_dot_at_phi(t, y)
    u = np.array(v, dtype=float)
    ud = np.asarray(vd, dtype=float) + np.sum(np.asarray(vy) * psd, axis=1)
    gu = np.einsum("pji,pj->pi", K, np.asarray(vy, dtype=float))
    if np.any(outside):
        u[outside] = 0.0
        ud[outside] = 0.0
        gu[outside] = 0.0
    return u, ud, gu, outside


def _reference_lo(fam):
    return 0.0


def _reference_hi(fam):
    return fam.reference.length if fam.dim == 1 else None


def _outside_reference(fam, y):
    ref = fam.reference
    tol = 1e-12
    if ref.dim == 1:
        return (y[:, 0] < -tol) | (y[:, 0] > ref.length + tol)
    if hasattr(ref, "inner"):
        r = np.linalg.norm(y, axis=1)
        return (r < ref.inner - tol) | (r > ref.outer + tol)
    if hasattr(ref, "radius"):
        return np.linalg.norm(y, axis=1) > ref.radius + tol
    return np.zeros(len(y), dtype=bool)


def lift_dirichlet(W, U0, U1, fixed_points, moving_points=None, tol=1e-9):
    """Reduce a nonzero load W on the fixed boundary to homogeneous data.

    Returns (f, u0, u1) with f(t,x) = Lap W - W_tt, u0 = U0 - W(0,.),
    u1 = U1 - W_t(0,.).  W must vanish on the moving boundary; U0 must
    match W(0,.) on the fixed boundary.
    """
    fixed_points = np.atleast_1d(np.asarray(fixed_points, dtype=float))
    gap = np.max(np.abs(np.asarray(U0(fixed_points)) - W(0.0, fixed_points)))
    if gap > tol:
        raise BoundaryMismatch(f"U0 differs from W(0,.) by {gap} on the fixed boundary")
    if moving_points is not None:
        ts, xs = moving_points
        wmax = float(np.max(np.abs(W(np.asarray(ts), np.asarray(xs)))))
        if wmax > tol:
            raise BoundaryMismatch(f"W does not vanish on the moving boundary (max {wmax})")

    def f(t, x):
        return W.dxx(t, x) - W.dtt(t, x)

    class _U0:
        def __call__(self, x):
            return np.asarray(U0(x)) - W(0.0, x)

        def deriv(self, x):
            return np.asarray(U0.deriv(x)) - W.dx(0.0, x)

    def u1(x):
        return np.asarray(U1(x)) - W.dt(0.0, x)

    return f, _U0(), u1
