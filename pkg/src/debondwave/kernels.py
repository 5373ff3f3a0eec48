"""Hot numerical kernels.

Two inner loops dominate runtime: the RK4 method-of-lines stepper for the
1d hyperbolic solver, and the RK4 flow-map integrator (with variational
Jacobian) behind sublevel-set motion families.  Both exist in a numba
version and a pure-numpy version; ``backend`` picks one at import time,
and the benchmark script times the two against each other.

The stepper advances  v'' = d/dy(B v') - a v' + 2 b v'* + g  on a uniform
grid with homogeneous Dirichlet ends (v'* is the y-derivative of the
velocity).  Coefficients are sampled on the RK4 half-step grid: slot 2k
is time t_k, slot 2k+1 is t_k + dt/2.
"""

import numpy as np

from .backend import NUMBA_ENABLED, njit

BLOWUP_LIMIT = 1.0e12

# --- finite-difference wave stepper --------------------------------------


def _fd_rhs_numpy(v, vd, h, Bm, an, bn, gn, out):
    inv_h2 = 1.0 / (h * h)
    inv_2h = 0.5 / h
    flux = (Bm[1:] * (v[2:] - v[1:-1]) - Bm[:-1] * (v[1:-1] - v[:-2])) * inv_h2
    adv = an[1:-1] * (v[2:] - v[:-2]) * inv_2h
    drift = bn[1:-1] * (vd[2:] - vd[:-2]) * inv_2h
    out[1:-1] = flux - adv + 2.0 * drift + gn[1:-1]
    out[0] = 0.0
    out[-1] = 0.0
    return out


def _fd_run_numpy(v, vd, h, dt, nsteps, Bm, an, bn, gn, store_every, out_v, out_vd):
    n1 = v.shape[0]
    acc = np.empty(n1)
    k1a = np.empty(n1)
    k2a = np.empty(n1)
    k3a = np.empty(n1)
    k4a = np.empty(n1)
    frozen = Bm.shape[0] == 1
    stored = 1
    for k in range(nsteps):
        j0 = 0 if frozen else 2 * k
        j1 = 0 if frozen else 2 * k + 1
        j2 = 0 if frozen else 2 * k + 2
        _fd_rhs_numpy(v, vd, h, Bm[j0], an[j0], bn[j0], gn[j0], k1a)
        v2 = v + (0.5 * dt) * vd
        vd2 = vd + (0.5 * dt) * k1a
        _fd_rhs_numpy(v2, vd2, h, Bm[j1], an[j1], bn[j1], gn[j1], k2a)
        v3 = v + (0.5 * dt) * vd2
        vd3 = vd + (0.5 * dt) * k2a
        _fd_rhs_numpy(v3, vd3, h, Bm[j1], an[j1], bn[j1], gn[j1], k3a)
        v4 = v + dt * vd3
        vd4 = vd + dt * k3a
        _fd_rhs_numpy(v4, vd4, h, Bm[j2], an[j2], bn[j2], gn[j2], k4a)
        acc[:] = vd + 2.0 * vd2 + 2.0 * vd3 + vd4
        v += (dt / 6.0) * acc
        vd += (dt / 6.0) * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
        v[0] = v[-1] = 0.0
        vd[0] = vd[-1] = 0.0
        if np.max(np.abs(v)) > BLOWUP_LIMIT:
            return -(k + 1)
        if (k + 1) % store_every == 0:
            out_v[stored] = v
            out_vd[stored] = vd
            stored += 1
    return stored


@njit
def _fd_run_numba(v, vd, h, dt, nsteps, Bm, an, bn, gn, store_every, out_v, out_vd):  # pragma: no cover - numba path
    n1 = v.shape[0]
    n = n1 - 1
    inv_h2 = 1.0 / (h * h)
    inv_2h = 0.5 / h
    v2 = np.empty(n1)
    v3 = np.empty(n1)
    v4 = np.empty(n1)
    vd2 = np.empty(n1)
    vd3 = np.empty(n1)
    vd4 = np.empty(n1)
    k1a = np.zeros(n1)
    k2a = np.zeros(n1)
    k3a = np.zeros(n1)
    k4a = np.zeros(n1)
    frozen = Bm.shape[0] == 1
    stored = 1
    for k in range(nsteps):
        if frozen:
            j0 = 0
            j1 = 0
            j2 = 0
        else:
            j0 = 2 * k
            j1 = 2 * k + 1
            j2 = 2 * k + 2
        B0 = Bm[j0]
        a0 = an[j0]
        b0 = bn[j0]
        g0 = gn[j0]
        for i in range(1, n):
            flux = (B0[i] * (v[i + 1] - v[i]) - B0[i - 1] * (v[i] - v[i - 1])) * inv_h2
            adv = a0[i] * (v[i + 1] - v[i - 1]) * inv_2h
            drift = b0[i] * (vd[i + 1] - vd[i - 1]) * inv_2h
            k1a[i] = flux - adv + 2.0 * drift + g0[i]
        for i in range(n1):
            v2[i] = v[i] + 0.5 * dt * vd[i]
            vd2[i] = vd[i] + 0.5 * dt * k1a[i]
        v2[0] = v2[n] = 0.0
        vd2[0] = vd2[n] = 0.0
        B1 = Bm[j1]
        a1 = an[j1]
        b1 = bn[j1]
        g1 = gn[j1]
        for i in range(1, n):
            flux = (B1[i] * (v2[i + 1] - v2[i]) - B1[i - 1] * (v2[i] - v2[i - 1])) * inv_h2
            adv = a1[i] * (v2[i + 1] - v2[i - 1]) * inv_2h
            drift = b1[i] * (vd2[i + 1] - vd2[i - 1]) * inv_2h
            k2a[i] = flux - adv + 2.0 * drift + g1[i]
        for i in range(n1):
            v3[i] = v[i] + 0.5 * dt * vd2[i]
            vd3[i] = vd[i] + 0.5 * dt * k2a[i]
        v3[0] = v3[n] = 0.0
        vd3[0] = vd3[n] = 0.0
        for i in range(1, n):
            flux = (B1[i] * (v3[i + 1] - v3[i]) - B1[i - 1] * (v3[i] - v3[i - 1])) * inv_h2
            adv = a1[i] * (v3[i + 1] - v3[i - 1]) * inv_2h
            drift = b1[i] * (vd3[i + 1] - vd3[i - 1]) * inv_2h
            k3a[i] = flux - adv + 2.0 * drift + g1[i]
        for i in range(n1):
            v4[i] = v[i] + dt * vd3[i]
            vd4[i] = vd[i] + dt * k3a[i]
        v4[0] = v4[n] = 0.0
        vd4[0] = vd4[n] = 0.0
        B2 = Bm[j2]
        a2 = an[j2]
        b2 = bn[j2]
        g2 = gn[j2]
        for i in range(1, n):
            flux = (B2[i] * (v4[i + 1] - v4[i]) - B2[i - 1] * (v4[i] - v4[i - 1])) * inv_h2
            adv = a2[i] * (v4[i + 1] - v4[i - 1]) * inv_2h
            drift = b2[i] * (vd4[i + 1] - vd4[i - 1]) * inv_2h
            k4a[i] = flux - adv + 2.0 * drift + g2[i]
        sixth = dt / 6.0
        vmax = 0.0
        for i in range(n1):
            v[i] += sixth * (vd[i] + 2.0 * vd2[i] + 2.0 * vd3[i] + vd4[i])
            vd[i] += sixth * (k1a[i] + 2.0 * k2a[i] + 2.0 * k3a[i] + k4a[i])
            if abs(v[i]) > vmax:
                vmax = abs(v[i])
        v[0] = v[n] = 0.0
        vd[0] = vd[n] = 0.0
        if vmax > BLOWUP_LIMIT:
            return -(k + 1)
        if (k + 1) % store_every == 0:
            out_v[stored] = v
            out_vd[stored] = vd
            stored += 1
    return stored


fd_run = _fd_run_numba if NUMBA_ENABLED else _fd_run_numpy


# --- sublevel flow map with variational Jacobian --------------------------
#
# Vector field  X(t, x) = s(t) * (g(x) - R) * grad g / |grad g|^2  with
# s = rho'/rho.  g is either radial (g = |x|) or affine (g = c.x + d);
# both are passed through (gkind, R, cvec, dshift).  rho is a polynomial
# with ascending coefficients rho_c; drho_c holds its derivative.

GKIND_RADIAL = 0
GKIND_LINEAR = 1


def _polyval_np(c, t):
    return np.polynomial.polynomial.polyval(t, c)


def _flow_field_numpy(tau, x, gkind, R, cvec, dshift, rho_c, drho_c):
    s = _polyval_np(drho_c, tau) / _polyval_np(rho_c, tau)
    if gkind == GKIND_RADIAL:
        r = np.linalg.norm(x, axis=1, keepdims=True)
        X = s * (r - R) * x / r
        n = x.shape[1]
        eye = np.eye(n)[None, :, :]
        outer = x[:, :, None] * x[:, None, :]
        DX = s * ((1.0 - R / r)[:, :, None] * eye + R * outer / (r ** 3)[:, :, None])
    else:
        c2 = float(np.dot(cvec, cvec))
        gval = x @ cvec + dshift
        X = s * (gval - R)[:, None] * cvec[None, :] / c2
        DX = np.broadcast_to(s * np.outer(cvec, cvec) / c2, (x.shape[0], len(cvec), len(cvec))).copy()
    return X, DX


def _flow_map_numpy(Y, t0, t1, nsteps, gkind, R, cvec, dshift, rho_c, drho_c, with_jac):
    x = np.array(Y, dtype=float)
    P, n = x.shape
    J = np.tile(np.eye(n), (P, 1, 1))
    if nsteps <= 0 or t1 == t0:
        return x, J
    dt = (t1 - t0) / nsteps
    for k in range(nsteps):
        tau = t0 + k * dt

        X1, D1 = _flow_field_numpy(tau, x, gkind, R, cvec, dshift, rho_c, drho_c)
        x2 = x + 0.5 * dt * X1
        X2, D2 = _flow_field_numpy(tau + 0.5 * dt, x2, gkind, R, cvec, dshift, rho_c, drho_c)
        x3 = x + 0.5 * dt * X2
        X3, D3 = _flow_field_numpy(tau + 0.5 * dt, x3, gkind, R, cvec, dshift, rho_c, drho_c)
        x4 = x + dt * X3
        X4, D4 = _flow_field_numpy(tau + dt, x4, gkind, R, cvec, dshift, rho_c, drho_c)

        if with_jac:
            K1 = np.einsum("pij,pjk->pik", D1, J)
            K2 = np.einsum("pij,pjk->pik", D2, J + 0.5 * dt * K1)
            K3 = np.einsum("pij,pjk->pik", D3, J + 0.5 * dt * K2)
            K4 = np.einsum("pij,pjk->pik", D4, J + dt * K3)
            J = J + (dt / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4)
        x = x + (dt / 6.0) * (X1 + 2.0 * X2 + 2.0 * X3 + X4)
    return x, J


@njit(cache=True)
def _polyval_nb(c, t):  # pragma: no cover - numba path
    acc = 0.0
    for i in range(len(c) - 1, -1, -1):
        acc = acc * t + c[i]
    return acc


@njit(cache=True)
def _flow_map_numba(Y, t0, t1, nsteps, gkind, R, cvec, dshift, rho_c, drho_c, with_jac):  # pragma: no cover - numba path
    P, n = Y.shape
    x = Y.copy()
    J = np.zeros((P, n, n))
    for p in range(P):
        for i in range(n):
            J[p, i, i] = 1.0
    if nsteps <= 0 or t1 == t0:
        return x, J
    dt = (t1 - t0) / nsteps
    c2 = 0.0
    for i in range(n):
        c2 += cvec[i] * cvec[i]

    xs = np.empty((4, n))
    Xs = np.empty((4, n))
    Ds = np.empty((4, n, n))
    Ks = np.empty((4, n, n))
    Jt = np.empty((n, n))

    for p in range(P):
        xp = x[p].copy()
        Jp = J[p].copy()
        for k in range(nsteps):
            tau = t0 + k * dt
            for stage in range(4):
                if stage == 0:
                    ts = tau
                    for i in range(n):
                        xs[stage, i] = xp[i]
                elif stage == 1:
                    ts = tau + 0.5 * dt
                    for i in range(n):
                        xs[stage, i] = xp[i] + 0.5 * dt * Xs[0, i]
                elif stage == 2:
                    ts = tau + 0.5 * dt
                    for i in range(n):
                        xs[stage, i] = xp[i] + 0.5 * dt * Xs[1, i]
                else:
                    ts = tau + dt
                    for i in range(n):
                        xs[stage, i] = xp[i] + dt * Xs[2, i]
                s = _polyval_nb(drho_c, ts) / _polyval_nb(rho_c, ts)
                if gkind == GKIND_RADIAL:
                    r = 0.0
                    for i in range(n):
                        r += xs[stage, i] * xs[stage, i]
                    r = np.sqrt(r)
                    for i in range(n):
                        Xs[stage, i] = s * (r - R) * xs[stage, i] / r
                    for i in range(n):
                        for j in range(n):
                            val = s * R * xs[stage, i] * xs[stage, j] / (r * r * r)
                            if i == j:
                                val += s * (1.0 - R / r)
                            Ds[stage, i, j] = val
                else:
                    gval = dshift
                    for i in range(n):
                        gval += cvec[i] * xs[stage, i]
                    for i in range(n):
                        Xs[stage, i] = s * (gval - R) * cvec[i] / c2
                    for i in range(n):
                        for j in range(n):
                            Ds[stage, i, j] = s * cvec[i] * cvec[j] / c2
            if with_jac:
                for stage in range(4):
                    # Jt = J + coeff*K_{stage-1}
                    if stage == 0:
                        for i in range(n):
                            for j in range(n):
                                Jt[i, j] = Jp[i, j]
                    elif stage == 1 or stage == 2:
                        for i in range(n):
                            for j in range(n):
                                Jt[i, j] = Jp[i, j] + 0.5 * dt * Ks[stage - 1, i, j]
                    else:
                        for i in range(n):
                            for j in range(n):
                                Jt[i, j] = Jp[i, j] + dt * Ks[2, i, j]
                    for i in range(n):
                        for j in range(n):
                            acc = 0.0
                            for m in range(n):
                                acc += Ds[stage, i, m] * Jt[m, j]
                            Ks[stage, i, j] = acc
                for i in range(n):
                    for j in range(n):
                        Jp[i, j] += (dt / 6.0) * (
                            Ks[0, i, j] + 2.0 * Ks[1, i, j] + 2.0 * Ks[2, i, j] + Ks[3, i, j]
                        )
            for i in range(n):
                xp[i] += (dt / 6.0) * (Xs[0, i] + 2.0 * Xs[1, i] + 2.0 * Xs[2, i] + Xs[3, i])
        x[p] = xp
        J[p] = Jp
    return x, J


def flow_map(Y, t0, t1, nsteps, gkind, R, cvec, dshift, rho_c, drho_c, with_jac=True):
    """Integrate the sublevel flow (and optionally DPhi) from t0 to t1."""
    Y = np.ascontiguousarray(np.atleast_2d(np.asarray(Y, dtype=float)))
    cvec = np.ascontiguousarray(np.asarray(cvec, dtype=float))
    rho_c = np.ascontiguousarray(np.asarray(rho_c, dtype=float))
    drho_c = np.ascontiguousarray(np.asarray(drho_c, dtype=float))
    if NUMBA_ENABLED:
        return _flow_map_numba(
            Y, float(t0), float(t1), int(nsteps), int(gkind), float(R),
            cvec, float(dshift), rho_c, drho_c, bool(with_jac),
        )
    return _flow_map_numpy(
        Y, float(t0), float(t1), int(nsteps), int(gkind), float(R),
        cvec, float(dshift), rho_c, drho_c, bool(with_jac),
    )
