"""Positive work condition (PWC) and its geometry in the S(Omega_21)-S(Omega_01) plane.

Everything is phrased through Omega_21 = -Omega_12 and dOmega_21 = -dOmega_12,
so the general condition reads

    A(Omega_01) S(Omega_01) dOmega_01 + A(Omega_21) S(Omega_21) dOmega_21 > 0.

With the closure prefactor (positive) this left-hand side is exactly the
extracted work, which is what ties this module to :mod:`cycle`.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .detector import GapSchedule, classify_signs, format_triple, parse_triple
from .errors import ExponentOverflow, NonPositiveResponse, ZeroDelta
from .response import ResponseSet

MAX_EXPONENT = 709.0


def effective_temperature(f_plus: float, f_minus: float, omega: float,
                          f_plus_err: float = 0.0, f_minus_err: float = 0.0) -> float:
    """Signed effective temperature from 1/T = ln(F(-omega)/F(omega)) / omega.

    A flat ratio gives ``math.inf``; population-inverting ratios give T < 0.
    """
    for name, f, err in (("F(+omega)", f_plus, f_plus_err), ("F(-omega)", f_minus, f_minus_err)):
        if not f > 0:
            extra = " (inside its error bar)" if abs(f) <= err else ""
            raise NonPositiveResponse(f"{name} = {f!r} is not positive{extra}")
    if omega == 0:
        raise ZeroDelta("effective temperature needs a nonzero gap")
    x = math.log(f_minus / f_plus)
    if x == 0.0:
        return math.inf
    return omega / x


def _exponent(omega: float, t: float) -> float:
    if math.isinf(t):
        return 0.0
    x = omega / t
    if abs(x) > MAX_EXPONENT:
        raise ExponentOverflow(f"|omega/T| = {abs(x):.6g} exceeds the double exponent range")
    return x


def s_value(omega_i: float, omega_ii: float, t_i: float, t_ii: float) -> float:
    """S = exp(Omega_II / T_II) - exp(Omega_I / T_I)."""
    return math.exp(_exponent(omega_ii, t_ii)) - math.exp(_exponent(omega_i, t_i))


def a_weight(f_i: float, sigma_i: float, f_ii: float, sigma_ii: float) -> float:
    """Harmonic combination [1/(sigma_I F_I) + 1/(sigma_II F_II)]^-1."""
    if not (f_i > 0 and f_ii > 0):
        raise NonPositiveResponse(f"a_weight needs positive responses, got {f_i!r}, {f_ii!r}")
    x, y = sigma_i * f_i, sigma_ii * f_ii
    return x * y / (x + y)


def theta_slope(a_01: float, a_21: float, delta01: float, delta12: float) -> float:
    """Boundary slope (A_21/A_01) |dOmega_12/dOmega_01|; zero when Omega_12 is held fixed."""
    if delta01 == 0:
        raise ZeroDelta("theta is undefined for dOmega_01 = 0 (vertical boundary)")
    return (a_21 / a_01) * abs(delta12 / delta01)


def pwc_lhs(a_01: float, s_01: float, a_21: float, s_21: float, delta01: float,
            delta12: float) -> float:
    return a_01 * s_01 * delta01 - a_21 * s_21 * delta12


def quadrant(s_21: float, s_01: float) -> int:
    """Fig. 3(a) labelling: horizontal axis S(Omega_21), vertical axis S(Omega_01)."""
    right, up = s_21 >= 0, s_01 >= 0
    if right and up:
        return 1
    if up:
        return 2
    if not right:
        return 3
    return 4


def half_plane(s_21, s_01, sign01: int, sign12: int, theta: float):
    """sign01 * S01 > sign12 * theta * S21 (the general PWC divided by A_01 |dOmega_01|)."""
    return sign01 * np.asarray(s_01) > sign12 * theta * np.asarray(s_21)


REDUCED_FORMS = {
    (1, 1, 1): ("S01 > theta*S21", 1.0),
    (1, -1, 1): ("S01 > -theta*S21", -1.0),
    (1, -1, -1): ("S01 > -theta*S21", -1.0),
}


def evaluate_pwc(s_01: float, s_21: float, a_01: float, a_21: float, delta01: float,
                 delta12: float, sign_triple=None) -> dict:
    """General inequality plus, for (+,+,+) and (+,-,+-), the reduced boundary form."""
    lhs = pwc_lhs(a_01, s_01, a_21, s_21, delta01, delta12)
    out = {"satisfied": bool(lhs > 0), "lhs": lhs, "boundary_form": None, "reduced": None}
    if sign_triple is None:
        return out
    triple = tuple(sign_triple)
    if triple in REDUCED_FORMS:
        form, sign = REDUCED_FORMS[triple]
        theta = theta_slope(a_01, a_21, delta01, delta12)
        out["boundary_form"] = form
        out["reduced"] = bool(s_01 > sign * theta * s_21)
    return out


@dataclass(frozen=True)
class PwcReport:
    t_eff_i_01: float
    t_eff_i_12: float
    t_eff_ii_01: float
    t_eff_ii_12: float
    s_01: float
    s_21: float
    a_01: float
    a_21: float
    theta: float
    sign_triple: str
    pwc_satisfied: bool
    quadrant: int
    lhs: float
    boundary_form: str | None = None
    reduced_satisfied: bool | None = None

    def as_dict(self) -> dict:
        return asdict(self)


def pwc_report(rs_i: ResponseSet, rs_ii: ResponseSet, sigma_i: float, sigma_ii: float,
               gaps: GapSchedule) -> PwcReport:
    g1, g2 = gaps.stage_i, gaps.stage_ii
    err_i, err_ii = rs_i.quad_error, rs_ii.quad_error
    t_i01 = effective_temperature(rs_i.f_plus_01, rs_i.f_minus_01, g1.omega01, err_i, err_i)
    t_i12 = effective_temperature(rs_i.f_plus_12, rs_i.f_minus_12, g1.omega12, err_i, err_i)
    t_ii01 = effective_temperature(rs_ii.f_plus_01, rs_ii.f_minus_01, g2.omega01, err_ii, err_ii)
    t_ii12 = effective_temperature(rs_ii.f_plus_12, rs_ii.f_minus_12, g2.omega12, err_ii, err_ii)
    s01 = s_value(g1.omega01, g2.omega01, t_i01, t_ii01)
    # Omega_21 = -Omega_12 and T(-Omega) = T(Omega)
    s21 = s_value(-g1.omega12, -g2.omega12, t_i12, t_ii12)
    a01 = a_weight(rs_i.f_plus_01, sigma_i, rs_ii.f_plus_01, sigma_ii)
    a21 = a_weight(rs_i.f_minus_12, sigma_i, rs_ii.f_minus_12, sigma_ii)
    d01, d12 = gaps.delta01, gaps.delta12
    theta = theta_slope(a01, a21, d01, d12) if d01 != 0 else math.inf
    try:
        triple = classify_signs(gaps)
        label = format_triple(triple)
    except ZeroDelta:
        triple, label = None, "degenerate"
    verdict = evaluate_pwc(s01, s21, a01, a21, d01, d12, triple)
    return PwcReport(t_i01, t_i12, t_ii01, t_ii12, s01, s21, a01, a21, theta, label,
                     verdict["satisfied"], quadrant(s21, s01), verdict["lhs"],
                     verdict["boundary_form"], verdict["reduced"])


def region_grid(case, theta: float, extent: float = 1.0, n: int = 101):
    """Sample the S21-S01 square and mark the PWC half-plane for ``case``.

    Returns a list of ``(s_21, s_01, satisfied)`` rows ordered row-major in
    s_01 then s_21.  ``case`` is a triple or a label such as ``"+-±"``.
    """
    if not theta >= 0:
        raise ValueError("theta must be >= 0")
    triple = parse_triple(case) if isinstance(case, str) else tuple(case)
    axis = np.linspace(-extent, extent, n)
    s21, s01 = np.meshgrid(axis, axis)
    mask = half_plane(s21, s01, triple[0], triple[1], theta)
    return [(float(a), float(b), bool(m)) for a, b, m in zip(s21.ravel(), s01.ravel(), mask.ravel())]
