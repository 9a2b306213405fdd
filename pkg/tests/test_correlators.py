import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qutrit_otto.correlators import (CorrelatorSpec, SINGULAR_COEFF, _csch2_minus_inv2,
                                     default_epsilon, kms_ratio_check, load_tabulated, wightman,
                                     write_tabulated)
from qutrit_otto.errors import DegenerateRegulator, NotThermal, ValidationError

dtaus = np.linspace(-30, 30, 241)


def test_vacuum_coincidence_value():
    w = wightman(CorrelatorSpec("inertial_vacuum", epsilon=1e-9), 1.0, 0.0)
    assert w.real == pytest.approx(-1 / (4 * math.pi ** 2), rel=1e-12)
    assert SINGULAR_COEFF == pytest.approx(-2.533029591e-2)


def test_cold_thermal_is_vacuum():
    vac = wightman(CorrelatorSpec("inertial_vacuum", epsilon=1e-2), dtaus, 0.0)
    cold = wightman(CorrelatorSpec("inertial_thermal", temperature=1e-8, epsilon=1e-2), dtaus, 0.0)
    assert np.allclose(cold, vac, rtol=1e-8, atol=1e-14)


@given(st.floats(0.1, 20.0))
def test_accelerated_is_thermal_at_unruh_temperature(a):
    acc = CorrelatorSpec("accelerated_vacuum", acceleration=a, epsilon=1e-3)
    th = CorrelatorSpec("inertial_thermal", temperature=a / (2 * math.pi), epsilon=1e-3)
    assert np.allclose(wightman(acc, dtaus, 0.0), wightman(th, dtaus, 0.0), rtol=1e-10, atol=1e-300)


def test_series_branch_is_continuous():
    x = np.array([0.0999999, 0.1000001, 0.05 + 0.0999j, 0.05 + 0.1001j])
    v = _csch2_minus_inv2(x)
    assert abs(v[0] - v[1]) < 1e-6
    assert abs(v[2] - v[3]) < 1e-5
    ref = 1 / np.sinh(0.3) ** 2 - 1 / 0.3 ** 2
    assert _csch2_minus_inv2(np.array([0.3]))[0] == pytest.approx(ref, rel=1e-12)


def test_regulator_required():
    with pytest.raises(DegenerateRegulator):
        wightman(CorrelatorSpec("inertial_vacuum"), 1.0, 0.0)
    assert default_epsilon(10.0, 2.0) == pytest.approx(5e-4)


def test_spec_validation():
    with pytest.raises(ValidationError):
        CorrelatorSpec("inertial_thermal", temperature=-1.0)
    with pytest.raises(ValidationError):
        CorrelatorSpec("accelerated_vacuum")


def test_kms_helper():
    spec = CorrelatorSpec("inertial_thermal", temperature=1.0)
    assert kms_ratio_check(spec, 0.0, 10.0)["measured_ratio"] == 1.0
    r = kms_ratio_check(spec, 1.0, 10.0)
    assert r["measured_ratio"] == pytest.approx(math.exp(-1), rel=0.02)
    with pytest.raises(NotThermal):
        kms_ratio_check(CorrelatorSpec("inertial_vacuum"), 1.0, 10.0)


def test_tabulated_round_trip(tmp_path):
    spec = CorrelatorSpec("inertial_thermal", temperature=0.7, epsilon=0.05)
    t = np.linspace(-2, 2, 9)
    vals = wightman(spec, t[:, None], t[None, :])
    path = tmp_path / "w.csv"
    write_tabulated(path, t, t, vals)
    tab = load_tabulated(path)
    assert tab.kind == "user_tabulated"
    assert np.allclose(wightman(tab, t[:, None], t[None, :]), vals, rtol=0, atol=0)
    # bilinear between grid nodes
    corners = vals[4:6, 1:3]
    assert wightman(tab, 0.25, -1.25) == pytest.approx(corners.mean(), rel=1e-12)


def test_tabulated_rejects_holes(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("tau,tau_prime,re_w,im_w\n0,0,1,0\n0,1,1,0\n1,0,1,0\n")
    with pytest.raises(ValidationError):
        load_tabulated(path)
