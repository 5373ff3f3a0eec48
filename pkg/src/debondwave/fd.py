"""Method-of-lines grid solver for the transformed 1d problem.

Space: flux-form central differences for d/dy(B v_y) with B at cell
midpoints, centered first differences for the a and b terms, homogeneous
Dirichlet ends.  Time: classical RK4 at fixed step, coefficients sampled
on the half-step grid.  The CFL guard dt <= 0.9 h / sqrt(max B) raises
before an unstable run starts; pick_dt() below applies the sharper bound
including the drift speed |b| + sqrt(b^2 + B) that strongly moving
domains need.
"""

import numpy as np

from . import kernels
from .errors import BlowUp, CflViolation
from .galerkin import Trajectory

CFL_SAFETY = 0.9


def max_wave_speed(problem, L, nt=33, npts=257):
    """max over samples of |b| + sqrt(b^2 + B), the transformed char speed."""
    ts = np.linspace(0.0, getattr(problem.fam, "horizon", 1.0), nt)
    y = np.linspace(0.0, L, npts)
    best = 0.0
    for t in ts:
        B, _, b, _ = problem.line(t, y)
        best = max(best, float(np.max(np.abs(b) + np.sqrt(b * b + np.maximum(B, 0.0)))))
    return best


def pick_dt(problem, L, n, safety=0.7, nt=33):
    h = L / n
    return safety * h / max_wave_speed(problem, L, nt=nt)


def solve_fd(problem, L, n, v0, v1, dt, T, store_every=1, cfl_check=True):
    """Solve the transformed problem on n cells over (0, L) up to time T.

    v0, v1 are callables; the trajectory stores nodal values each
    store_every steps.  Raises CflViolation or BlowUp.
    """
    if n < 8:
        raise ValueError("need at least 8 grid cells")
    h = L / n
    x = np.linspace(0.0, L, n + 1)
    xm = 0.5 * (x[:-1] + x[1:])
    nsteps = int(round(T / dt))
    if abs(nsteps * dt - T) > 1e-9 * max(1.0, T):
        nsteps = int(np.ceil(T / dt - 1e-12))
    if nsteps % store_every:
        raise ValueError("store_every must divide the step count")

    # sample all half-step coefficient slices up front (vectorized in y)
    S = 2 * nsteps + 1
    Bm = np.empty((S, n))
    an = np.empty((S, n + 1))
    bn = np.empty((S, n + 1))
    gn = np.empty((S, n + 1))
    maxB = 0.0
    for j in range(S):
        t = 0.5 * j * dt
        Bmid, _, _, _ = problem.line(t, xm)
        _, a, b, g = problem.line(t, x)
        Bm[j] = Bmid
        an[j] = a
        bn[j] = b
        gn[j] = g
        maxB = max(maxB, float(np.max(Bmid)))
    if cfl_check and dt > CFL_SAFETY * h / np.sqrt(maxB):
        raise CflViolation(
            f"dt = {dt} exceeds {CFL_SAFETY} h / sqrt(max B) = {CFL_SAFETY * h / np.sqrt(maxB)}"
        )

    v = np.asarray(v0(x), dtype=float).copy()
    vd = np.asarray(v1(x), dtype=float).copy()
    v[0] = v[-1] = 0.0
    vd[0] = vd[-1] = 0.0

    nstored = nsteps // store_every + 1
    out_v = np.empty((nstored, n + 1))
    out_vd = np.empty((nstored, n + 1))
    out_v[0] = v
    out_vd[0] = vd
    status = kernels.fd_run(v, vd, h, dt, nsteps, Bm, an, bn, gn, store_every, out_v, out_vd)
    if status < 0:
        raise BlowUp(f"grid state exceeded {kernels.BLOWUP_LIMIT:g} at step {-status}; shrink dt")
    times = np.arange(nstored) * (store_every * dt)
    return Trajectory(
        kind="grid", times=times, values=out_v, velocities=out_vd,
        L=L, x=x, meta={"dt": dt, "n": n},
    )
