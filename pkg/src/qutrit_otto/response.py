"""Response functions and coherence integrals of one isochoric stroke.

Every stage integral has the form

    (1/sigma) int dtau dtau' Theta(...) chi chi' e^{-i(a tau + b tau')} W(tau, tau')

With u = tau - tau' and s = (tau + tau')/2 the centre-of-mass integral
factorises for stationary W into the overlap profile
``detector.overlap_profile`` (closed form for gaussian and rectangular
switching), leaving one integral over u.  The step functions become
half-lines u > 0 or u < 0, so the diagonal discontinuity never sits inside
a quadrature panel.

The coincidence singularity c/(u - i eps)^2 is removed by integrating by
parts once and subtracting the first Taylor term of the resulting smooth
factor; what is left is bounded and goes to :func:`quadrature.gk_quad`.
Non-stationary (tabulated) correlators use a nested adaptive scheme over
(u, s) with no factorisation.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np
from scipy import integrate

from .correlators import CorrelatorSpec, resolve
from .detector import (GapConfig, SwitchingProfile, overlap_half_width, overlap_profile,
                       shape_derivative, shape_value)
from .errors import QuadratureFailure, RectangularDivergenceWarning
from .quadrature import DEFAULT_MAX_DEPTH, DEFAULT_REL_TOL, gk_quad, oscillatory_panels


@dataclass(frozen=True)
class Integral:
    value: complex
    error: float
    scale: float = 0.0


@dataclass(frozen=True)
class ResponseSet:
    """All response and coherence integrals of one stage.

    ``f_plus_01`` is F(+Omega_01) (excitation e0 -> e1), ``f_minus_12`` is
    F(-Omega_12) (de-excitation e2 -> e1), and so on.
    """

    f_plus_01: float
    f_minus_01: float
    f_plus_12: float
    f_minus_12: float
    x_int: complex
    y_int: complex
    z_int: complex
    stage: str
    quad_error: float

    def f(self, gap: str, sign: int) -> float:
        return getattr(self, f"f_{'plus' if sign > 0 else 'minus'}_{gap}")

    def as_dict(self) -> dict:
        out = asdict(self)
        for key in ("x_int", "y_int", "z_int"):
            out[key] = [out[key].real, out[key].imag]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ResponseSet":
        data = dict(data)
        for key in ("x_int", "y_int", "z_int"):
            v = data[key]
            data[key] = complex(v[0], v[1]) if isinstance(v, (list, tuple)) else complex(v)
        return cls(**data)

    def with_coherence(self, x_int, y_int, z_int) -> "ResponseSet":
        d = asdict(self)
        d.update(x_int=x_int, y_int=y_int, z_int=z_int)
        return ResponseSet(**d)


# --------------------------------------------------------------------------
# profile providers: u -> (p(u), p'(u)) for p(u) = d(u/sigma; k)


def _separable_profile(chi: SwitchingProfile, k: float):
    sigma = chi.sigma

    def prof(u):
        d, dd = overlap_profile(chi.shape, np.asarray(u) / sigma, k)
        return d, dd / sigma

    return prof


def _nested_profile(chi: SwitchingProfile, k: float):
    """Same profile, with the centre-of-mass integral done by adaptive quad."""
    sigma, shape = chi.sigma, chi.shape
    half = 6.0 if shape == "gaussian" else 0.5

    def one(x):
        lim = half - 0.5 * abs(x)
        if lim <= 0:
            return 0.0, 0.0
        f = lambda y: float(shape_value(shape, y + 0.5 * x) * shape_value(shape, y - 0.5 * x)) * math.cos(k * y)
        g = lambda y: 0.5 * float(shape_derivative(shape, y + 0.5 * x) * shape_value(shape, y - 0.5 * x)
                                  - shape_value(shape, y + 0.5 * x) * shape_derivative(shape, y - 0.5 * x)) * math.cos(k * y)
        lim_k = max(50, int(abs(k) * lim) + 50)
        d = integrate.quad(f, -lim, lim, epsabs=1e-14, epsrel=1e-12, limit=lim_k)[0]
        dd = integrate.quad(g, -lim, lim, epsabs=1e-14, epsrel=1e-12, limit=lim_k)[0]
        if shape == "rectangular":
            dd = -math.copysign(math.cos(k * lim), x) if x != 0 else -1.0
        return d, dd

    def prof(u):
        u = np.atleast_1d(np.asarray(u, dtype=float))
        vals = np.array([one(x) for x in u / sigma])
        return vals[:, 0], vals[:, 1] / sigma

    return prof


# --------------------------------------------------------------------------
# one-sided integrals over the separation u


def _half_line(spec: CorrelatorSpec, eps_s: float, nu: float, prof, length: float,
               osc: float, rel_tol: float, max_depth: int) -> Integral:
    """int_0^L e^{-i nu u} W(u - i eps_s) p(u) du, for either sign of eps_s.

    The negative half-line of a stationary, even-in-z correlator is this
    same integral with (nu, eps_s) -> (-nu, -eps_s).
    """
    c = spec.singular_coeff
    eps = abs(eps_s)
    p0, dp0 = (float(v[0]) for v in prof(np.array([0.0])))
    pl, _ = (float(v[0]) for v in prof(np.array([length])))
    g0 = complex(p0)
    g1 = dp0 - 1j * nu * p0
    gl = cmath.exp(-1j * nu * length) * pl
    analytic = c * (1j * g0 / eps_s - gl / (length - 1j * eps_s)
                    + g1 * (0.5 * math.log1p((length / eps) ** 2) + 1j * math.atan(length / eps_s)))

    def integrand(u):
        p, dp = prof(u)
        ph = np.exp(-1j * nu * u)
        z = u - 1j * eps_s
        gp = ph * (dp - 1j * nu * p)
        return c * (gp - g1) / z + ph * spec.regular_part(z) * p

    bps = [b for b in (eps, 10 * eps, 100 * eps) if b < length]
    panels = oscillatory_panels(length, osc)
    val, err = gk_quad(integrand, 0.0, length, rel_tol=rel_tol, abs_tol=1e-15,
                       max_depth=max_depth, breakpoints=bps, panels=panels)
    return Integral(analytic + val, err, abs(analytic) + abs(val))


def _u_integral(spec: CorrelatorSpec, chi: SwitchingProfile, nu: float, k: float, part: str,
                rel_tol: float, max_depth: int, method: str) -> Integral:
    """int_{part} du e^{-i nu u} W(u) d(u/sigma; k), part in {full, pos, neg}."""
    prof = _separable_profile(chi, k) if method == "separable" else _nested_profile(chi, k)
    length = overlap_half_width(chi.shape) * chi.sigma
    osc = abs(nu) + abs(k) / (2.0 * chi.sigma)
    eps = spec.epsilon
    val, err, scale = 0j, 0.0, 0.0
    if part in ("full", "pos"):
        r = _half_line(spec, eps, nu, prof, length, osc, rel_tol, max_depth)
        val, err, scale = val + r.value, err + r.error, scale + r.scale
    if part in ("full", "neg"):
        r = _half_line(spec, -eps, -nu, prof, length, osc, rel_tol, max_depth)
        val, err, scale = val + r.value, err + r.error, scale + r.scale
    return Integral(val, err, scale)


def _tabulated_integral(spec: CorrelatorSpec, chi: SwitchingProfile, a: float, b: float,
                        part: str, rel_tol: float) -> Integral:
    """Nested adaptive (u outer, s inner) integral for a non-stationary W.

    Computes (1/sigma) int dtau dtau' Theta chi chi' e^{-i(a tau + b tau')} W.
    """
    lo, hi = chi.support()
    width = hi - lo
    table = spec.table

    def inner(u, which):
        smin = lo + 0.5 * abs(u)
        smax = hi - 0.5 * abs(u)
        if smax <= smin:
            return 0.0

        def f(s):
            t, tp = s + 0.5 * u, s - 0.5 * u
            w = complex(table(t, tp))
            val = float(chi(t) * chi(tp)) * cmath.exp(-1j * (a * t + b * tp)) * w
            return val.real if which == 0 else val.imag

        return integrate.quad(f, smin, smax, epsabs=1e-13, epsrel=rel_tol, limit=200)[0]

    def outer_part(which, u0, u1):
        return integrate.quad(lambda u: inner(u, which), u0, u1, epsabs=1e-12,
                              epsrel=rel_tol, limit=200, full_output=1)[:2]

    ranges = {"full": [(-width, 0.0), (0.0, width)], "pos": [(0.0, width)], "neg": [(-width, 0.0)]}[part]
    total, err = 0j, 0.0
    for u0, u1 in ranges:
        re, ere = outer_part(0, u0, u1)
        im, eim = outer_part(1, u0, u1)
        total += re + 1j * im
        err += ere + eim
    return Integral(total / chi.sigma, err / chi.sigma)


# --------------------------------------------------------------------------
# public operations


def _prepare(spec: CorrelatorSpec, chi: SwitchingProfile, omega_max: float) -> CorrelatorSpec:
    if chi.shape == "rectangular":
        warnings.warn("rectangular switching: coherence and response integrals depend on the "
                      "regulator and need not converge", RectangularDivergenceWarning, stacklevel=3)
    return resolve(spec, chi.sigma, max(abs(omega_max), 1e-300))


def _check(res: Integral, rel_tol: float, what: str) -> None:
    scale = max(abs(res.value), res.scale, 1e-300)
    if not math.isfinite(res.error) or res.error > max(100 * rel_tol * scale, 1e-10):
        raise QuadratureFailure(f"{what}: error {res.error:.3e} too large for value {res.value:.6e}")


def _response_integral(spec, chi, omega, rel_tol, max_depth, method) -> Integral:
    if spec.stationary and method != "tabulated":
        return _u_integral(spec, chi, omega, 0.0, "full", rel_tol, max_depth, method)
    return _tabulated_integral(spec, chi, omega, -omega, "full", rel_tol)


@dataclass(frozen=True)
class Response:
    value: float
    error: float
    imag: float


def response(spec: CorrelatorSpec, chi: SwitchingProfile, omega: float, *,
             rel_tol: float = DEFAULT_REL_TOL, max_depth: int = DEFAULT_MAX_DEPTH,
             method: str = "separable") -> Response:
    """Response function F(omega) for one switching window.

    ``omega > 0`` uses the kernel e^{-i omega (tau - tau')} (excitation).
    ``method`` is ``"separable"`` (closed-form centre-of-mass factor) or
    ``"nested"`` (adaptive inner quadrature); tabulated correlators always
    take the generic nested (tau, tau') route.
    """
    spec = _prepare(spec, chi, abs(omega))
    res = _response_integral(spec, chi, omega, rel_tol, max_depth, method)
    _check(res, rel_tol, f"F({omega})")
    value = res.value
    if abs(value.imag) > max(10 * res.error, 1e-9 * abs(value.real), 1e-14):
        raise QuadratureFailure(f"F({omega}) has imaginary part {value.imag:.3e} "
                                f"beyond error {res.error:.3e}")
    return Response(float(value.real), float(res.error), float(value.imag))


def coherence_integrals(spec: CorrelatorSpec, chi: SwitchingProfile, g: GapConfig, *,
                        rel_tol: float = DEFAULT_REL_TOL, max_depth: int = DEFAULT_MAX_DEPTH,
                        method: str = "separable"):
    """(X, Y, Z) integrals for the coherence <e0|rho|e2> of one stage.

    X carries e^{-i(Omega_12 tau + Omega_01 tau')} over the full square.
    Y and Z carry e^{-i(Omega_01 tau + Omega_12 tau')} restricted to
    tau < tau' and tau > tau' respectively.  They enter the coherence as
    C = (lambda^2 sigma / 2) [p1 X - p0 Y - p2 Z].

    Returns ``((X, Y, Z), error)``.
    """
    spec = _prepare(spec, chi, g.omega02)
    k = g.omega02 * chi.sigma
    phase = cmath.exp(-1j * g.omega02 * chi.center)
    half_diff = 0.5 * (g.omega12 - g.omega01)
    if spec.stationary and method != "tabulated":
        x = _u_integral(spec, chi, half_diff, k, "full", rel_tol, max_depth, method)
        y = _u_integral(spec, chi, -half_diff, k, "neg", rel_tol, max_depth, method)
        z = _u_integral(spec, chi, -half_diff, k, "pos", rel_tol, max_depth, method)
        x = Integral(phase * x.value, x.error)
        y = Integral(phase * y.value, y.error)
        z = Integral(phase * z.value, z.error)
    else:
        x = _tabulated_integral(spec, chi, g.omega12, g.omega01, "full", rel_tol)
        y = _tabulated_integral(spec, chi, g.omega01, g.omega12, "neg", rel_tol)
        z = _tabulated_integral(spec, chi, g.omega01, g.omega12, "pos", rel_tol)
    return (x.value, y.value, z.value), x.error + y.error + z.error


def stage_response_set(spec: CorrelatorSpec, chi: SwitchingProfile, g: GapConfig, stage: str = "I", *,
                       rel_tol: float = DEFAULT_REL_TOL, max_depth: int = DEFAULT_MAX_DEPTH,
                       method: str = "separable") -> ResponseSet:
    """Bundle F(+-Omega_01), F(+-Omega_12) and X, Y, Z with a shared error budget."""
    spec = resolve(spec, chi.sigma, g.omega02)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RectangularDivergenceWarning)
        fs = {}
        err = 0.0
        for name, om in (("01", g.omega01), ("12", g.omega12)):
            for sgn, label in ((1, "plus"), (-1, "minus")):
                r = response(spec, chi, sgn * om, rel_tol=rel_tol, max_depth=max_depth, method=method)
                fs[f"f_{label}_{name}"] = r.value
                err += r.error
        (x, y, z), cerr = coherence_integrals(spec, chi, g, rel_tol=rel_tol, max_depth=max_depth,
                                              method=method)
    if chi.shape == "rectangular":
        warnings.warn("rectangular switching: coherence integrals are regulator dependent",
                      RectangularDivergenceWarning, stacklevel=2)
    return ResponseSet(x_int=x, y_int=y, z_int=z, stage=stage, quad_error=err + cerr, **fs)
