import numpy as np
import pytest

from debondwave import kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Trigger JIT compilation once so timed checks measure compute only."""
    v = np.zeros(9)
    vd = np.zeros(9)
    Bm = np.ones((1, 8))
    an = np.zeros((1, 9))
    out = np.empty((2, 9))
    kernels.fd_run(v, vd, 0.125, 0.01, 1, Bm, an, an, an, 1, out, out.copy())
    pts = np.array([[0.5, 0.0]])
    kernels.flow_map(pts, 0.0, 0.1, 8, kernels.GKIND_RADIAL, 1.0,
                     np.zeros(2), 0.0, np.array([0.2, 0.1]), np.array([0.1]))
    kernels.flow_map(np.array([[0.5]]), 0.0, 0.1, 8, kernels.GKIND_LINEAR, 4.0,
                     np.array([-1.0]), 4.0, np.array([1.0, 0.5]), np.array([0.5]))
