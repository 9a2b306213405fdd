import functools
import json
import math
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from _support import after, rel_change, thermal
from qutrit_otto.cycle import (CycleSetup, adiabatic_work, closed_form_shifts, closed_form_work,
                               closure_xi, cycle_from_responses, extracted_work, isochoric_heat,
                               run_cycle, solve_closure, stage_sets)
from qutrit_otto.detector import GapConfig, GapSchedule, QutritState, SwitchingProfile
from qutrit_otto.errors import DegenerateClosure, PerturbativeBreakdown, ValidationError
from qutrit_otto.response import ResponseSet

DATA = Path(__file__).parent / "data"
F_NAMES = ("f_plus_01", "f_minus_01", "f_plus_12", "f_minus_12")
positive = st.floats(1e-3, 10.0)


def rset(values, stage="I"):
    return ResponseSet(*values, 0j, 0j, 0j, stage, 0.0)


@functools.lru_cache(maxsize=None)
def sympy_closure():
    """p1, p2 from solving delta_I + delta_II = 0 symbolically."""
    sp = pytest.importorskip("sympy")
    p1, p2 = sp.symbols("p1 p2")
    si, sii = sp.symbols("sigma_I sigma_II", positive=True)
    fi = sp.symbols("a_p01 a_m01 a_p12 a_m12", positive=True)
    fii = sp.symbols("b_p01 b_m01 b_p12 b_m12", positive=True)

    def shifts(f, s):
        fp01, fm01, fp12, fm12 = f
        p0 = 1 - p1 - p2
        d2 = s * (p1 * fp12 - p2 * fm12)
        d1 = s * (p0 * fp01 - p1 * fm01 + p2 * fm12 - p1 * fp12)
        return d1, d2

    d1i, d2i = shifts(fi, si)
    d1ii, d2ii = shifts(fii, sii)
    sol = sp.solve([d1i + d1ii, d2i + d2ii], [p1, p2], dict=True)[0]
    return sp, (si, sii, fi, fii), sol[p1], sol[p2], d1i.subs(sol), d2i.subs(sol)


@given(st.lists(positive, min_size=10, max_size=10))
@settings(max_examples=25, deadline=None)
def test_closure_matches_symbolic_solution(vals):
    sp, (si, sii, fi, fii), p1, p2, d1, d2 = sympy_closure()
    subs = dict(zip((si, sii) + fi + fii, vals))
    a, b = rset(vals[2:6]), rset(vals[6:10], "II")
    sol = solve_closure(a, b, vals[0], vals[1])
    assert sol.p1 == pytest.approx(float(p1.subs(subs)), rel=1e-10)
    assert sol.p2 == pytest.approx(float(p2.subs(subs)), rel=1e-10)
    # Gamma = 2 Xi in the closed-form shifts (lambda^2 / 2 factored out)
    total, upper = closed_form_shifts(a, b, vals[0], vals[1], coupling=math.sqrt(2.0))
    assert total == pytest.approx(float((d1 + d2).subs(subs)), rel=1e-8, abs=1e-12)
    assert upper == pytest.approx(float(d2.subs(subs)), rel=1e-8, abs=1e-12)


@given(st.lists(positive, min_size=10, max_size=10))
def test_xi_factorisation(vals):
    si, sii = vals[:2]
    a, b = rset(vals[2:6]), rset(vals[6:10], "II")
    A = {n: si * getattr(a, n) + sii * getattr(b, n) for n in F_NAMES}
    ref = (A["f_minus_01"] * A["f_minus_12"] + A["f_plus_01"] * A["f_minus_12"]
           + A["f_plus_01"] * A["f_plus_12"])
    assert closure_xi(a, b, si, sii) == pytest.approx(ref, rel=1e-12)


def test_adiabatic_work_examples():
    s = GapSchedule(GapConfig(1.3, 1.0), GapConfig(1.0, 0.7))
    assert adiabatic_work(QutritState(0.0, 0.0), s, "I") == 0.0
    assert adiabatic_work(QutritState(1.0, 0.0), s, "I") == pytest.approx(0.3)
    st_ = QutritState(0.2, 0.1)
    assert adiabatic_work(st_, s, "I") + adiabatic_work(st_, s, "II") == 0.0
    with pytest.raises(ValueError):
        adiabatic_work(st_, s, "III")


def test_heat_examples():
    g = GapConfig(0.8, 1.1)
    zero = rset((0.0,) * 4)
    h = isochoric_heat(zero, QutritState(0.3, 0.2), g, 5.0, 0.1)
    assert (h.q, h.delta_p1, h.delta_p2) == (0.0, 0.0, 0.0)
    rs = rset((0.2, 0.5, 0.3, 0.7))
    h = isochoric_heat(rs, QutritState(1.0, 0.0), g, 5.0, 0.1)
    assert h.delta_p2 == pytest.approx(0.5 * 0.01 * 5.0 * 0.3)
    with pytest.raises(PerturbativeBreakdown):
        isochoric_heat(rs, QutritState(1.0, 0.0), g, 5.0, 1.0)
    assert extracted_work(0.0, 0.0, GapSchedule(g, GapConfig(0.5, 0.5))) == 0.0


def test_detailed_balance_fixed_point():
    t, sigma = 1.0, 40.0
    g = GapConfig(0.7, 0.9)
    spec = thermal(t)
    from qutrit_otto.response import stage_response_set
    rs = stage_response_set(spec, SwitchingProfile("gaussian", sigma), g)
    z = 1 + math.exp(-g.omega01 / t) + math.exp(-g.omega02 / t)
    gibbs = QutritState(math.exp(-g.omega01 / t) / z, math.exp(-g.omega02 / t) / z)
    h = isochoric_heat(rs, gibbs, g, sigma, 1e-2)
    scale = 0.5 * 1e-4 * sigma * max(rs.f_plus_01, rs.f_minus_01)
    assert abs(h.delta_p1) < 0.01 * scale and abs(h.delta_p2) < 0.01 * scale


def _setup(t_i, t_ii, gaps, sigma=40.0):
    chi_i = SwitchingProfile("gaussian", sigma, 0.0)
    return CycleSetup(thermal(t_i), thermal(t_ii), gaps, chi_i, after(chi_i, "gaussian", sigma))


def test_identical_baths_give_gibbs_and_no_work():
    g = GapConfig(0.9, 0.9)
    setup = _setup(1.0, 1.0, GapSchedule(g, g))
    ledger, closure = run_cycle(setup)
    boltz = math.exp(-0.9)
    p0 = 1 - closure.p1 - closure.p2
    assert closure.p1 / p0 == pytest.approx(boltz, rel=5e-3)
    assert closure.p2 / closure.p1 == pytest.approx(boltz, rel=5e-3)
    scale = abs(ledger.q2) + 1e-4
    for v in (ledger.w_ext, ledger.delta_p1_i, ledger.delta_p2_i):
        assert abs(v) < 1e-14 * scale


def test_hot_cold_engine_and_first_law():
    gaps = GapSchedule(GapConfig(1.0, 1.2), GapConfig(0.8, 0.9))
    ledger, closure = run_cycle(_setup(2.0, 0.5, gaps))
    assert ledger.w_ext > 0 and ledger.q2 > 0 > ledger.q4
    assert abs(ledger.w_ext - (ledger.q2 + ledger.q4)) < 1e-12 * max(abs(ledger.q2), abs(ledger.q4))
    d = ledger.diagnostics
    assert d["w_ext_closed_form"] == pytest.approx(ledger.w_ext, rel=1e-10)
    assert d["w_ext_direct"] == pytest.approx(ledger.w_ext, rel=1e-6)


def test_regression_values():
    from qutrit_otto.config import load_config
    cfg = load_config(str(Path(__file__).parent.parent / "configs" / "regression.toml"))
    ledger, _ = run_cycle(cfg.setup())
    pinned = json.loads((DATA / "regression_cycle.json").read_text())
    for key in ("w1", "q2", "w3", "q4", "w_ext", "delta_p1_i", "delta_p2_i"):
        assert rel_change(pinned[key], getattr(ledger, key)) < 1e-12, key
    for key in ("p1", "p2", "xi"):
        assert rel_change(pinned["diagnostics"][key], ledger.diagnostics[key]) < 1e-12, key


def test_overlapping_windows_rejected():
    g = GapSchedule(GapConfig(1.0, 1.2), GapConfig(0.8, 0.9))
    chi = SwitchingProfile("smooth_bump", 4.0, 0.0)
    with pytest.raises(ValidationError) as exc:
        run_cycle(CycleSetup(thermal(1.0), thermal(0.5), g, chi,
                             SwitchingProfile("smooth_bump", 4.0, 3.9)))
    assert "disjoint" in str(exc.value)


def test_degenerate_closure():
    zero = rset((0.0,) * 4)
    with pytest.raises(DegenerateClosure):
        solve_closure(zero, zero, 1.0, 1.0)


@given(st.lists(positive, min_size=10, max_size=10), st.floats(-0.5, 0.5), st.floats(-0.5, 0.5))
def test_random_closure_residuals(vals, d01, d12):
    g2 = GapConfig(1.0, 1.0)
    gaps = GapSchedule(GapConfig(1.0 + d01, 1.0 + d12), g2)
    chi_i = SwitchingProfile("gaussian", vals[0], 0.0)
    setup = CycleSetup(thermal(1.0), thermal(1.0), gaps, chi_i, after(chi_i, "gaussian", vals[1]),
                       coupling=1e-2)
    a, b = rset(vals[2:6]), rset(vals[6:10], "II")
    ledger, _ = cycle_from_responses(a, b, setup)
    lam2s = 1e-4 * max(vals[:2])
    assert abs(ledger.delta_p1_i + ledger.delta_p1_ii) < 1e-12 * lam2s
    assert abs(ledger.delta_p2_i + ledger.delta_p2_ii) < 1e-12 * lam2s
    cf = closed_form_work(a, b, vals[0], vals[1], 1e-2, gaps)
    assert abs(cf - ledger.w_ext) <= 1e-10 * max(abs(ledger.w_ext), 1e-300) + 1e-15 * lam2s


def test_stage_ii_independent_of_stage_i():
    gaps = GapSchedule(GapConfig(1.0, 1.2), GapConfig(0.8, 0.9))
    _, b1 = stage_sets(_setup(2.0, 0.5, gaps, 10.0))
    _, b2 = stage_sets(_setup(0.7, 0.5, gaps, 10.0))
    assert b1 == b2
