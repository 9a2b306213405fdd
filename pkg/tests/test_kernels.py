import os
import subprocess
import sys

import numpy as np
import pytest

from qutrit_otto import kernels
from qutrit_otto.detector import GapConfig, QutritState, SwitchingProfile, interaction_jx


def inputs(n, uniform=True, seed=0):
    rng = np.random.default_rng(seed)
    chi = SwitchingProfile("smooth_bump", 3.0, 0.0)
    lo, hi = chi.support()
    taus = np.linspace(lo, hi, n)
    if not uniform:
        taus = np.sort(np.concatenate([[lo, hi], rng.uniform(lo, hi, n - 2)]))
    w = np.gradient(taus)
    cw = w * chi(taus)
    jx = np.ascontiguousarray(interaction_jx(taus, GapConfig(0.9, 1.4)))
    rho0 = np.ascontiguousarray(QutritState(0.3, 0.2).matrix())
    return taus, cw, jx, rho0


requires_compiled = pytest.mark.skipif(not kernels.HAVE_COMPILED, reason="extension not built")


@requires_compiled
@pytest.mark.parametrize("uniform", [True, False])
@pytest.mark.parametrize("kind, param", [(0, 0.0), (1, 3.0), (2, 0.8)])
def test_backends_agree(uniform, kind, param):
    data = inputs(201, uniform)
    a = kernels.dyson_sums(*data, kind, param, 0.05, backend="numpy")
    b = kernels.dyson_sums(*data, kind, param, 0.05, backend="cython")
    for x, y in zip(a, b):
        assert np.max(np.abs(x - y)) <= 1e-12 * np.max(np.abs(x))


def test_matrix_entry_point_matches():
    from qutrit_otto.correlators import CorrelatorSpec, wightman
    taus, cw, jx, rho0 = inputs(101)
    spec = CorrelatorSpec("inertial_thermal", temperature=0.8, epsilon=0.05)
    wmat = wightman(spec, taus[:, None], taus[None, :])
    a = kernels.dyson_sums_matrix(wmat, cw, jx, rho0)
    b = kernels.dyson_sums(taus, cw, jx, rho0, 2, 0.8, 0.05, backend="numpy")
    for x, y in zip(a, b):
        assert np.allclose(x, y, rtol=1e-12, atol=1e-15)


def test_pure_fallback_env():
    code = "import qutrit_otto as q; print(q.BACKEND)"
    env = dict(os.environ, OTTO_QUTRIT_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True)
    assert out.stdout.strip() == "numpy"
