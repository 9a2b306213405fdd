import math

import numpy as np
import pytest

from qutrit_otto.errors import QuadratureFailure
from qutrit_otto.quadrature import gk_quad, oscillatory_panels


@pytest.mark.parametrize("deg", range(0, 23))
def test_kronrod_polynomial_exactness(deg):
    # a single 15-point Kronrod panel integrates degree <= 22 exactly
    val, _ = gk_quad(lambda x: x ** deg, -1.0, 1.0, max_depth=0,
                    raise_on_failure=False)
    exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
    assert val == pytest.approx(exact, abs=1e-14)


def test_oscillatory_complex():
    w, L = 37.0, 10.0
    f = lambda x: np.exp(-1j * w * x) * np.exp(-x / 4)
    val, err = gk_quad(f, 0.0, L, rel_tol=1e-12, panels=oscillatory_panels(L, w))
    a = 0.25 + 1j * w
    exact = (1 - np.exp(-a * L)) / a
    assert abs(val - exact) < 1e-11
    assert err < 1e-9


def test_breakpoints_handle_kinks():
    val, _ = gk_quad(lambda x: np.abs(x - 0.3), 0.0, 1.0, breakpoints=[0.3], rel_tol=1e-12)
    assert val == pytest.approx(0.3 ** 2 / 2 + 0.7 ** 2 / 2, rel=1e-13)


def test_failure_is_reported():
    with pytest.raises(QuadratureFailure):
        gk_quad(lambda x: 1 / np.sqrt(np.abs(x) + 1e-300), -1.0, 1.0, rel_tol=1e-14, max_depth=3)
    val, err = gk_quad(lambda x: 1 / np.sqrt(np.abs(x) + 1e-300), -1.0, 1.0, rel_tol=1e-14,
                       max_depth=3, raise_on_failure=False)
    assert math.isfinite(val) and err > 0
