import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate
from scipy.linalg import expm

from qutrit_otto.detector import (E0, E1, E2, GapConfig, GapSchedule, QutritState, SIGN_TRIPLES,
                                  SwitchingProfile, classify_signs, format_triple,
                                  free_hamiltonian, interaction_jx, jx_matrix, overlap_profile,
                                  parse_triple, shape_value)
from qutrit_otto.errors import ValidationError, ZeroDelta

gaps = st.floats(0.05, 5.0)


def test_jx_entries():
    j = jx_matrix()
    s = 1 / math.sqrt(2)
    for a, b in ((E1, E0), (E0, E1), (E2, E1), (E1, E2)):
        assert j[a, b] == pytest.approx(s)
    assert j[E2, E0] == 0 and j[E0, E2] == 0
    assert (j @ j)[E2, E0] == pytest.approx(0.5)


@pytest.mark.parametrize("g, diag", [((1, 1), (2, 1, 0)), ((1, 2), (3, 1, 0))])
def test_free_hamiltonian(g, diag):
    assert np.array_equal(free_hamiltonian(GapConfig(*g)), np.diag(diag))


@given(st.floats(0, 1), st.floats(0, 1), gaps, gaps)
def test_energy_is_trace(a, b, w01, w12):
    p1, p2 = a * (1 - b), a * b
    st_ = QutritState(p1, p2)
    g = GapConfig(w01, w12)
    assert st_.energy(g) == pytest.approx(np.trace(st_.matrix() @ free_hamiltonian(g)).real)


@given(gaps, gaps, st.floats(-20, 20))
@settings(max_examples=50)
def test_interaction_picture_matches_expm(w01, w12, tau):
    g = GapConfig(w01, w12)
    h = free_hamiltonian(g)
    ref = expm(1j * h * tau) @ jx_matrix() @ expm(-1j * h * tau)
    assert np.allclose(interaction_jx(tau, g), ref, atol=1e-12)


def test_interaction_symbolic_branch():
    sympy = pytest.importorskip("sympy")
    t = sympy.Symbol("t", real=True)
    g = GapConfig(0.7, 1.3)
    m = interaction_jx(t, g, exp=sympy.exp)
    num = np.array(m.subs(t, 0.4).evalf(), dtype=complex)
    assert np.allclose(num, interaction_jx(0.4, g))


@pytest.mark.parametrize("d01, d12, triple", [(0.5, 0.3, "+++"), (0.5, -0.2, "+-+"),
                                              (0.2, -0.5, "+--")])
def test_classify_signs(d01, d12, triple):
    s = GapSchedule(GapConfig(1 + d01, 1 + d12), GapConfig(1.0, 1.0))
    assert format_triple(classify_signs(s)) == triple


def test_zero_delta():
    with pytest.raises(ZeroDelta):
        classify_signs(GapSchedule(GapConfig(1.0, 1.2), GapConfig(1.0, 1.0)))


def test_parse_triple():
    assert parse_triple("(+,-,+)") == (1, -1, 1)
    assert parse_triple("+-±") == (1, -1, 1)
    assert parse_triple("--pm") == (-1, -1, -1)
    assert {parse_triple(format_triple(t)) for t in SIGN_TRIPLES} == set(SIGN_TRIPLES)
    for bad in ("++-", "+x+", "++"):
        with pytest.raises(ValueError):
            parse_triple(bad)


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 0.1), st.floats(-0.1, 0.1))
def test_state_round_trip(a, b, re, im):
    s = QutritState(a * (1 - b), a * b, complex(re, im) * a)
    m = s.matrix()
    assert np.allclose(m, m.conj().T)
    assert m[E0, E2] == s.coherence
    assert QutritState.from_matrix(m) == s


def test_invalid_profile_lists_everything():
    with pytest.raises(ValidationError) as exc:
        SwitchingProfile("boxcar", -1.0, math.nan)
    assert {p for p, _ in exc.value.violations} == {"shape", "sigma", "center"}


@pytest.mark.parametrize("shape", ["gaussian", "smooth_bump", "rectangular"])
@pytest.mark.parametrize("x, k", [(0.0, 0.0), (0.3, 0.0), (0.3, 4.0), (0.8, 11.0)])
def test_overlap_profile_vs_quad(shape, x, k):
    h = 8.0 if shape == "gaussian" else 0.5
    ref = integrate.quad(lambda y: shape_value(shape, y + x / 2) * shape_value(shape, y - x / 2)
                         * math.cos(k * y), -h, h, limit=400, points=[-0.5, 0.5])[0]
    d, _ = overlap_profile(shape, x, k)
    assert d[0] == pytest.approx(ref, abs=1e-10)
