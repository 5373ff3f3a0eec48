"""Benchmark the numba kernels against the pure-numpy fallbacks.

Runs the two hot loops (the RK4 wave stepper and the sublevel flow map
with variational Jacobian) on realistic sizes under both backends and
prints a timing table.  Usage:

    python benchmarks/bench_kernels.py [--steps N] [--grid N] [--points P]
"""

import argparse
import time

import numpy as np

from debondwave.backend import NUMBA_ENABLED
from debondwave.kernels import (
    GKIND_RADIAL,
    _fd_run_numpy,
    _flow_map_numpy,
)

if NUMBA_ENABLED:
    from debondwave.kernels import _fd_run_numba, _flow_map_numba


def bench_fd(impl, n, nsteps, repeats=3):
    h = 1.0 / n
    dt = 0.7 * h
    S = 2 * nsteps + 1
    rng = np.random.default_rng(0)
    y = np.linspace(0.0, 1.0, n + 1)
    Bm = 1.0 - 0.2 * np.sin(np.pi * 0.5 * (y[:-1] + y[1:]))[None, :] * np.ones((S, 1))
    an = 0.1 * y[None, :] * np.ones((S, 1))
    bn = 0.2 * y[None, :] * np.ones((S, 1))
    gn = np.zeros((S, n + 1))
    best = np.inf
    for _ in range(repeats):
        v = np.sin(np.pi * y)
        vd = rng.standard_normal(n + 1) * 0.01
        v[0] = v[-1] = vd[0] = vd[-1] = 0.0
        out_v = np.empty((2, n + 1))
        out_vd = np.empty((2, n + 1))
        out_v[0] = v
        out_vd[0] = vd
        t0 = time.perf_counter()
        impl(v, vd, h, dt, nsteps, Bm, an, bn, gn, nsteps, out_v, out_vd)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_flow(impl, points, nsteps, repeats=3):
    rng = np.random.default_rng(1)
    r = rng.uniform(0.82, 0.98, points)
    th = rng.uniform(0.0, 2 * np.pi, points)
    Y = np.stack([r * np.cos(th), r * np.sin(th)], axis=1)
    rho_c = np.array([0.2, 0.1])
    drho_c = np.array([0.1])
    cvec = np.zeros(2)
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        impl(Y.copy(), 0.0, 1.0, nsteps, GKIND_RADIAL, 1.0, cvec, 0.0,
             rho_c, drho_c, True)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=4000)
    ap.add_argument("--grid", type=int, default=800)
    ap.add_argument("--points", type=int, default=400)
    ap.add_argument("--flow-steps", type=int, default=512)
    args = ap.parse_args()

    rows = []
    t_np = bench_fd(_fd_run_numpy, args.grid, args.steps)
    rows.append(("wave stepper", "numpy", t_np, 1.0))
    if NUMBA_ENABLED:
        bench_fd(_fd_run_numba, 32, 4)  # JIT warmup
        t_nb = bench_fd(_fd_run_numba, args.grid, args.steps)
        rows.append(("wave stepper", "numba", t_nb, t_np / t_nb))

    f_np = bench_flow(_flow_map_numpy, args.points, args.flow_steps)
    rows.append(("flow map + jacobian", "numpy", f_np, 1.0))
    if NUMBA_ENABLED:
        bench_flow(_flow_map_numba, 4, 4)
        f_nb = bench_flow(_flow_map_numba, args.points, args.flow_steps)
        rows.append(("flow map + jacobian", "numba", f_nb, f_np / f_nb))

    print(f"{'kernel':<22} {'backend':<8} {'best time (s)':>14} {'speedup':>9}")
    for name, backend, t, s in rows:
        print(f"{name:<22} {backend:<8} {t:>14.4f} {s:>8.1f}x")
    if not NUMBA_ENABLED:
        print("numba not available: numpy rows only")


if __name__ == "__main__":
    main()
