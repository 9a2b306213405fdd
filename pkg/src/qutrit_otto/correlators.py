"""Pullback Wightman functions W(tau, tau') of a massless scalar in 3+1 D.

Built-in closed forms, with z = (tau - tau') - i*eps:

    inertial vacuum        W = -1 / (4 pi^2 z^2)
    uniform acceleration a W = -(a^2 / 16 pi^2) / sinh^2(a z / 2)
    inertial, thermal T    W = -(T^2 / 4) / sinh^2(pi T z)

All three share the coincidence singularity -1/(4 pi^2 z^2); the remainder
is analytic near z = 0.  The response engine integrates the singular piece
semi-analytically and the remainder numerically, so both pieces are exposed
here.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateRegulator, NotThermal, ValidationError

KINDS = ("inertial_vacuum", "accelerated_vacuum", "inertial_thermal", "user_tabulated")

SINGULAR_COEFF = -1.0 / (4.0 * math.pi ** 2)

# csch^2(x) - 1/x^2 = -1/3 + x^2/15 - 2 x^4/189 + x^6/675 - 2 x^8/10395 + ...
_SERIES = (-1.0 / 3.0, 1.0 / 15.0, -2.0 / 189.0, 1.0 / 675.0, -2.0 / 10395.0)


def _csch2_minus_inv2(x):
    """csch^2(x) - 1/x^2 for complex x, stable at small |x|."""
    x = np.asarray(x, dtype=complex)
    out = np.empty_like(x)
    small = np.abs(x) < 0.1
    xs = x[small]
    x2 = xs * xs
    acc = np.zeros_like(xs)
    for c in reversed(_SERIES):
        acc = acc * x2 + c
    out[small] = acc
    xl = x[~small]
    big = np.abs(xl.real) > 300.0
    with np.errstate(over="ignore", invalid="ignore"):
        sh = np.sinh(np.where(big, 1.0, xl))
        val = 1.0 / (sh * sh) - 1.0 / (xl * xl)
    val = np.where(big, -1.0 / (xl * xl), val)
    out[~small] = val
    return out


@dataclass(frozen=True)
class Tabulation:
    """Sampled W(tau, tau') on a rectangular grid."""

    tau: np.ndarray
    tau_prime: np.ndarray
    values: np.ndarray  # shape (len(tau), len(tau_prime)), complex

    def __call__(self, tau, tau_prime):
        tau, tau_prime = np.broadcast_arrays(np.asarray(tau, float), np.asarray(tau_prime, float))
        return _bilinear(self.tau, self.tau_prime, self.values, tau, tau_prime)


def _bilinear(xg, yg, v, x, y):
    ix = np.clip(np.searchsorted(xg, x, side="right") - 1, 0, len(xg) - 2)
    iy = np.clip(np.searchsorted(yg, y, side="right") - 1, 0, len(yg) - 2)
    tx = (x - xg[ix]) / (xg[ix + 1] - xg[ix])
    ty = (y - yg[iy]) / (yg[iy + 1] - yg[iy])
    outside = (x < xg[0]) | (x > xg[-1]) | (y < yg[0]) | (y > yg[-1])
    out = ((1 - tx) * (1 - ty) * v[ix, iy] + tx * (1 - ty) * v[ix + 1, iy]
           + (1 - tx) * ty * v[ix, iy + 1] + tx * ty * v[ix + 1, iy + 1])
    return np.where(outside, 0.0, out)


@dataclass(frozen=True)
class CorrelatorSpec:
    """A field state and trajectory, through its pullback two-point function.

    ``epsilon=None`` selects the default regulator
    ``1e-3 * min(sigma, 1 / Omega_max)`` once a stage is known (see
    :func:`default_epsilon`).
    """

    kind: str = "inertial_vacuum"
    acceleration: float | None = None
    temperature: float | None = None
    epsilon: float | None = None
    table: Tabulation | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.epsilon is not None and not self.epsilon > 0:
            raise DegenerateRegulator(f"regulator epsilon must be > 0, got {self.epsilon}")
        problems = self.violations()
        if problems:
            raise ValidationError(problems)

    def violations(self, prefix: str = "") -> list[tuple[str, str]]:
        out = []
        if self.kind not in KINDS:
            out.append((prefix + "kind", f"must be one of {', '.join(KINDS)}"))
        if self.kind == "accelerated_vacuum" and not (self.acceleration is not None and self.acceleration > 0):
            out.append((prefix + "acceleration", "must be > 0 for accelerated_vacuum"))
        if self.kind == "inertial_thermal" and not (self.temperature is not None and self.temperature > 0):
            out.append((prefix + "temperature", "must be > 0 for inertial_thermal"))
        if self.kind == "user_tabulated" and self.table is None:
            out.append((prefix + "table", "user_tabulated needs a tabulation"))
        return out

    @property
    def stationary(self) -> bool:
        return self.kind != "user_tabulated"

    @property
    def field_temperature(self) -> float | None:
        """Bath temperature (Unruh temperature a/2pi when accelerated)."""
        if self.kind == "inertial_thermal":
            return self.temperature
        if self.kind == "accelerated_vacuum":
            return self.acceleration / (2.0 * math.pi)
        return None

    @property
    def singular_coeff(self) -> float:
        return 0.0 if self.kind == "user_tabulated" else SINGULAR_COEFF

    def with_epsilon(self, epsilon: float) -> "CorrelatorSpec":
        return CorrelatorSpec(self.kind, self.acceleration, self.temperature, epsilon, self.table)

    def regular_part(self, z):
        """W(z) - SINGULAR_COEFF / z^2 for complex z = dtau - i eps (stationary kinds)."""
        z = np.asarray(z, dtype=complex)
        if self.kind == "inertial_vacuum":
            return np.zeros_like(z)
        if self.kind == "accelerated_vacuum":
            a = self.acceleration
            return -(a * a / (16.0 * math.pi ** 2)) * _csch2_minus_inv2(0.5 * a * z)
        if self.kind == "inertial_thermal":
            t = self.temperature
            return -(t * t / 4.0) * _csch2_minus_inv2(math.pi * t * z)
        raise ValueError("regular_part is only defined for stationary built-in kinds")

    def stationary_value(self, z):
        """W as an analytic function of the complex separation z."""
        z = np.asarray(z, dtype=complex)
        split = SINGULAR_COEFF / (z * z) + self.regular_part(z)
        if self.kind == "inertial_vacuum":
            return split
        # away from coincidence the split form cancels; use sinh directly
        half = 0.5 * self.acceleration if self.kind == "accelerated_vacuum" else math.pi * self.temperature
        x = half * z
        far = np.abs(x) >= 0.1
        # 1/sinh^2(y) = 4 e^{-2y} / (1 - e^{-2y})^2 with Re y >= 0: no overflow
        y = np.where(x.real < 0, -x, x)
        with np.errstate(under="ignore"):
            e = np.exp(-2.0 * np.where(far, y, 1.0))
        direct = SINGULAR_COEFF * half * half * 4.0 * e / (1.0 - e) ** 2
        return np.where(far, direct, split)


def default_epsilon(sigma: float, omega_max: float) -> float:
    return 1e-3 * min(sigma, 1.0 / omega_max)


def resolve(spec: CorrelatorSpec, sigma: float, omega_max: float) -> CorrelatorSpec:
    """Fill in the default regulator for a stage if none was given."""
    if spec.epsilon is not None:
        return spec
    return spec.with_epsilon(default_epsilon(sigma, omega_max))


def wightman(spec: CorrelatorSpec, tau, tau_prime):
    """W(tau, tau') with the i-epsilon prescription on tau - tau'."""
    if spec.kind == "user_tabulated":
        return spec.table(tau, tau_prime)
    if spec.epsilon is None or not spec.epsilon > 0:
        raise DegenerateRegulator("wightman() needs an explicit positive epsilon")
    dtau = np.asarray(tau, dtype=float) - np.asarray(tau_prime, dtype=float)
    return spec.stationary_value(dtau - 1j * spec.epsilon)


def load_tabulated(path, epsilon: float = 1e-3) -> CorrelatorSpec:
    """Read a CSV with header ``tau,tau_prime,re_w,im_w`` on a full grid."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"tau", "tau_prime", "re_w", "im_w"}
        if reader.fieldnames is None or not required <= set(reader.fieldnames):
            raise ValidationError([(str(path), f"CSV header must contain {sorted(required)}")])
        rows = [(float(r["tau"]), float(r["tau_prime"]), float(r["re_w"]), float(r["im_w"]))
                for r in reader]
    data = np.array(rows)
    taus = np.unique(data[:, 0])
    tps = np.unique(data[:, 1])
    if len(taus) < 2 or len(tps) < 2 or len(rows) != len(taus) * len(tps):
        raise ValidationError([(str(path), "samples must cover a full rectangular grid")])
    values = np.full((len(taus), len(tps)), np.nan, dtype=complex)
    ix = np.searchsorted(taus, data[:, 0])
    iy = np.searchsorted(tps, data[:, 1])
    values[ix, iy] = data[:, 2] + 1j * data[:, 3]
    if np.isnan(values).any():
        raise ValidationError([(str(path), "duplicate or missing grid samples")])
    return CorrelatorSpec("user_tabulated", epsilon=epsilon, table=Tabulation(taus, tps, values))


def write_tabulated(path, tau, tau_prime, values) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["tau", "tau_prime", "re_w", "im_w"])
        for i, t in enumerate(tau):
            for j, tp in enumerate(tau_prime):
                v = values[i, j]
                w.writerow([repr(float(t)), repr(float(tp)), repr(float(v.real)), repr(float(v.imag))])


def kms_ratio_check(spec: CorrelatorSpec, omega: float, sigma: float,
                    shape: str = "gaussian", rel_tol: float = 1e-6) -> dict:
    """Compare F(omega)/F(-omega) with the detailed-balance value e^{-omega/T}."""
    from .detector import SwitchingProfile
    from .response import response

    temp = spec.field_temperature
    if temp is None:
        raise NotThermal(f"{spec.kind} has no associated temperature")
    chi = SwitchingProfile(shape, sigma, 0.0)
    if omega == 0:
        return {"measured_ratio": 1.0, "expected_ratio": 1.0, "rel_error": 0.0}
    fp = response(spec, chi, omega, rel_tol=rel_tol)
    fm = response(spec, chi, -omega, rel_tol=rel_tol)
    measured = fp.value / fm.value
    expected = math.exp(-omega / temp)
    return {"measured_ratio": measured, "expected_ratio": expected,
            "rel_error": abs(measured - expected) / expected}
