"""The numba kernels and the numpy fallbacks must agree numerically."""

import numpy as np
import pytest

from debondwave import kernels
from debondwave.backend import NUMBA_ENABLED


@pytest.mark.skipif(not NUMBA_ENABLED, reason="numba backend not active")
def test_fd_run_backends_agree():
    n = 64
    h = 1.0 / n
    dt = 0.5 * h
    nsteps = 40
    S = 2 * nsteps + 1
    y = np.linspace(0.0, 1.0, n + 1)
    ym = 0.5 * (y[:-1] + y[1:])
    Bm = np.tile(1.0 - 0.3 * ym ** 2, (S, 1))
    an = np.tile(0.1 * y, (S, 1))
    bn = np.tile(0.2 * y, (S, 1))
    gn = np.tile(np.sin(np.pi * y), (S, 1))

    def run(impl):
        v = np.sin(np.pi * y)
        vd = 0.1 * np.random.default_rng(2).standard_normal(n + 1)
        v[0] = v[-1] = vd[0] = vd[-1] = 0.0
        out_v = np.empty((nsteps + 1, n + 1))
        out_vd = np.empty((nsteps + 1, n + 1))
        out_v[0] = v
        out_vd[0] = vd
        impl(v, vd, h, dt, nsteps, Bm, an, bn, gn, 1, out_v, out_vd)
        return out_v, out_vd

    va, da = run(kernels._fd_run_numba)
    vb, db = run(kernels._fd_run_numpy)
    assert np.max(np.abs(va - vb)) < 1e-13
    assert np.max(np.abs(da - db)) < 1e-13


@pytest.mark.skipif(not NUMBA_ENABLED, reason="numba backend not active")
def test_flow_map_backends_agree():
    rng = np.random.default_rng(3)
    r = rng.uniform(0.82, 0.98, 32)
    th = rng.uniform(0.0, 2 * np.pi, 32)
    Y = np.stack([r * np.cos(th), r * np.sin(th)], axis=1)
    args = (0.0, 1.0, 128, kernels.GKIND_RADIAL, 1.0,
            np.zeros(2), 0.0, np.array([0.2, 0.1]), np.array([0.1]), True)
    xa, Ja = kernels._flow_map_numba(np.ascontiguousarray(Y.copy()), *args)
    xb, Jb = kernels._flow_map_numpy(Y.copy(), *args)
    assert np.max(np.abs(xa - xb)) < 1e-12
    assert np.max(np.abs(Ja - Jb)) < 1e-12
