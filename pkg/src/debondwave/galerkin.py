"""Spectral Galerkin solver on the reference interval.

Basis: Dirichlet eigenfunctions of the 1d Laplacian on (0, L),
w_k(y) = sqrt(2/L) sin(k pi y / L) with eigenvalues lam_k = (k pi / L)^2.
Projecting the transformed equation gives the second-order system

    d''_k - 2 sum_l b_lk d'_l + sum_l (B_lk + a_lk) d_l = g_k,

with entries B_lk = <B w'_l, w'_k>, a_lk = <a w'_l, w_k>,
b_lk = <b w'_l, w_k>, g_k = <g, w_k>, all by composite Gauss-Legendre
quadrature.  Time integration is classical fixed-step RK4.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import BlowUp, QuadratureFailure


def gauss_legendre_panels(L, panels, nodes):
    """Composite Gauss-Legendre rule on (0, L): points and weights."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(0.0, L, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    pts = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wts = (half[:, None] * w[None, :]).ravel()
    return pts, wts


class SineBasis:
    """First m sine modes on (0, L), L^2-orthonormal."""

    def __init__(self, L, m):
        if m < 1:
            raise ValueError("need at least one mode")
        self.L = float(L)
        self.m = int(m)
        k = np.arange(1, m + 1)
        self.freqs = k * np.pi / self.L
        self.eigenvalues = self.freqs ** 2
        self.scale = np.sqrt(2.0 / self.L)

    def values(self, y):
        y = np.asarray(y, dtype=float)
        return self.scale * np.sin(np.outer(y, self.freqs))

    def derivs(self, y):
        y = np.asarray(y, dtype=float)
        return self.scale * self.freqs[None, :] * np.cos(np.outer(y, self.freqs))

    def project(self, f, panels=None, nodes=10):
        """L^2 coefficients of a callable by composite quadrature."""
        panels = panels or max(8, self.m)
        y, w = gauss_legendre_panels(self.L, panels, nodes)
        vals = np.asarray(f(y), dtype=float)
        return self.values(y).T @ (w * vals)


class GalerkinSystem:
    """Time-dependent projected matrices with a small stage cache."""

    def __init__(self, basis: SineBasis, problem, panels=None, nodes=10):
        self.basis = basis
        self.problem = problem
        panels = panels or max(8, basis.m)
        self.yq, self.wq = gauss_legendre_panels(basis.L, panels, nodes)
        self.W = basis.values(self.yq)     # (Q, m)
        self.Wp = basis.derivs(self.yq)    # (Q, m)
        self._cache = {}

    def matrices(self, t):
        """(Bmat, amat, bmat, gvec) with [k, l] = <.. w_l, w_k> pairing."""
        hit = self._cache.get(t)
        if hit is not None:
            return hit
        B, a, b, g = self.problem.line(t, self.yq)
        if not (np.all(np.isfinite(B)) and np.all(np.isfinite(a))
                and np.all(np.isfinite(b)) and np.all(np.isfinite(g))):
            raise QuadratureFailure(f"non-finite coefficients at t = {t}")
        wB = self.wq * B
        wa = self.wq * a
        wb = self.wq * b
        Bmat = self.Wp.T @ (wB[:, None] * self.Wp)
        amat = self.W.T @ (wa[:, None] * self.Wp)
        bmat = self.W.T @ (wb[:, None] * self.Wp)
        gvec = self.W.T @ (self.wq * g)
        out = (Bmat, amat, bmat, gvec)
        if len(self._cache) > 8:
            self._cache.clear()
        self._cache[t] = out
        return out

    def rhs(self, t, d, ddot):
        Bmat, amat, bmat, gvec = self.matrices(t)
        return 2.0 * (bmat @ ddot) - (Bmat + amat) @ d + gvec


@dataclass
class Trajectory:
    """Discrete-in-time solution, modal coefficients or grid values."""

    kind: str                 # 'modal' | 'grid'
    times: np.ndarray         # (nt,)
    values: np.ndarray        # (nt, K)
    velocities: np.ndarray    # (nt, K)
    L: float
    basis: SineBasis = None
    x: np.ndarray = None      # grid nodes for kind == 'grid'
    front: np.ndarray = None  # physical domain length per time (cylinder runs)
    meta: dict = field(default_factory=dict)

    def index_of(self, t):
        i = int(np.argmin(np.abs(self.times - t)))
        return i

    def eval(self, t, y):
        """(v, v_dot, v_y) at reference points y, at the stored time nearest t."""
        i = self.index_of(t)
        return self.eval_index(i, y)

    def eval_index(self, i, y):
        y = np.asarray(y, dtype=float).reshape(-1)
        if self.kind == "modal":
            W = self.basis.values(y)
            Wp = self.basis.derivs(y)
            v = W @ self.values[i]
            vd = W @ self.velocities[i]
            vy = Wp @ self.values[i]
        else:
            v = np.interp(y, self.x, self.values[i])
            vd = np.interp(y, self.x, self.velocities[i])
            vy = np.interp(y, self.x, _grid_gradient(self.values[i], self.x))
        return v, vd, vy

    def reference_eval(self):
        """Adapter (t, y) -> (v, v_dot, grad v) for transform.pushforward."""

        def _eval(t, ypts):
            y = np.asarray(ypts, dtype=float).reshape(-1)
            v, vd, vy = self.eval(t, y)
            return v, vd, vy.reshape(-1, 1)

        return _eval


def _grid_gradient(vals, x):
    return np.gradient(vals, x, edge_order=2)


def integrate(system: GalerkinSystem, d0, ddot0, dt, T, store_every=1):
    """RK4 on the projected system; the trajectory stores every step."""
    m = system.basis.m
    d = np.array(d0, dtype=float).reshape(m)
    dd = np.array(ddot0, dtype=float).reshape(m)
    nsteps = int(round(T / dt))
    if abs(nsteps * dt - T) > 1e-9 * max(1.0, T):
        nsteps = int(np.ceil(T / dt - 1e-12))
    if nsteps % store_every:
        raise ValueError("store_every must divide the step count")
    nstored = nsteps // store_every + 1
    times = np.empty(nstored)
    vals = np.empty((nstored, m))
    vels = np.empty((nstored, m))
    times[0] = 0.0
    vals[0] = d
    vels[0] = dd
    stored = 1
    t = 0.0
    for k in range(nsteps):
        k1d, k1v = dd, system.rhs(t, d, dd)
        d2 = d + 0.5 * dt * k1d
        v2 = dd + 0.5 * dt * k1v
        k2d, k2v = v2, system.rhs(t + 0.5 * dt, d2, v2)
        d3 = d + 0.5 * dt * k2d
        v3 = dd + 0.5 * dt * k2v
        k3d, k3v = v3, system.rhs(t + 0.5 * dt, d3, v3)
        d4 = d + dt * k3d
        v4 = dd + dt * k3v
        k4d, k4v = v4, system.rhs(t + dt, d4, v4)
        d = d + (dt / 6.0) * (k1d + 2 * k2d + 2 * k3d + k4d)
        dd = dd + (dt / 6.0) * (k1v + 2 * k2v + 2 * k3v + k4v)
        t = (k + 1) * dt
        norm = float(np.max(np.abs(d)))
        if not np.isfinite(norm) or norm > 1.0e12:
            raise BlowUp(f"modal state norm {norm} at t = {t}; shrink dt")
        if (k + 1) % store_every == 0:
            times[stored] = t
            vals[stored] = d
            vels[stored] = dd
            stored += 1
    return Trajectory(
        kind="modal", times=times, values=vals, velocities=vels,
        L=system.basis.L, basis=system.basis,
        meta={"dt": dt, "m": m},
    )


def solve_transformed_modal(problem, L, v0, v1, m=32, dt=1e-3, T=1.0,
                            panels=None, nodes=10, store_every=1):
    """Assemble and integrate in one call; v0, v1 are callables on (0, L)."""
    basis = SineBasis(L, m)
    system = GalerkinSystem(basis, problem, panels=panels, nodes=nodes)
    d0 = basis.project(v0)
    dd0 = basis.project(v1)
    return integrate(system, d0, dd0, dt, T, store_every=store_every)
