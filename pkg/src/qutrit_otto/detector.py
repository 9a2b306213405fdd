"""Algebraic structure of the ladder-type (spin-1) qutrit detector.

Basis order everywhere in this package is ``(e2, e1, e0)``: index 0 is the
*highest* level and index 2 the ground state.  This is the reverse of the
natural energy order and matches the printed density matrices, so the
coherence generated by the field is reported as ``rho[E0, E2]`` = <e0|rho|e2>.

The ground energy is fixed at zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ValidationError, ZeroDelta

E2, E1, E0 = 0, 1, 2

SHAPES = ("gaussian", "smooth_bump", "rectangular")

# Admissible (sgn d01, sgn d12, sgn d02); (+,+,-) and (-,-,+) cannot occur.
SIGN_TRIPLES = (
    (1, 1, 1),
    (1, -1, 1),
    (-1, 1, 1),
    (1, -1, -1),
    (-1, 1, -1),
    (-1, -1, -1),
)


def format_triple(triple) -> str:
    return "".join("+" if s > 0 else "-" for s in triple)


def parse_triple(text: str) -> tuple[int, int, int]:
    """Parse ``"+-+"``, ``"(+,-,+)"`` or ``"+-±"`` style case labels.

    A trailing ``±`` (or ``pm``) is expanded to ``+``; callers handling the
    ``(+,-,±)`` family only care about the first two signs.
    """
    cleaned = text.replace("(", "").replace(")", "").replace(",", "").replace(" ", "")
    cleaned = cleaned.replace("pm", "±")
    if len(cleaned) != 3 or any(c not in "+-±" for c in cleaned):
        raise ValueError(f"cannot parse sign triple {text!r}")
    signs = []
    for c in cleaned:
        signs.append(-1 if c == "-" else 1)
    triple = tuple(signs)
    if cleaned[2] == "±":
        triple = (triple[0], triple[1], triple[0] if triple[0] == triple[1] else 1)
    if triple not in SIGN_TRIPLES:
        raise ValueError(f"sign triple {text!r} is not admissible")
    return triple


@dataclass(frozen=True)
class GapConfig:
    """Adjacent energy gaps of the qutrit at one stage of the cycle."""

    omega01: float
    omega12: float

    def __post_init__(self):
        problems = self.violations()
        if problems:
            raise ValidationError(problems)

    def violations(self, prefix: str = "") -> list[tuple[str, str]]:
        out = []
        for name in ("omega01", "omega12"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                out.append((prefix + name, "must be a finite positive energy"))
        return out

    @property
    def omega02(self) -> float:
        return self.omega01 + self.omega12

    @property
    def energies(self) -> tuple[float, float, float]:
        """Level energies in basis order (e2, e1, e0)."""
        return (self.omega02, self.omega01, 0.0)


@dataclass(frozen=True)
class GapSchedule:
    """Gap configurations of stage I (bath I) and stage II (bath II).

    Deltas are ``stage_i - stage_ii``: the change applied by the first
    adiabatic stroke.
    """

    stage_i: GapConfig
    stage_ii: GapConfig

    @property
    def delta01(self) -> float:
        return self.stage_i.omega01 - self.stage_ii.omega01

    @property
    def delta12(self) -> float:
        return self.stage_i.omega12 - self.stage_ii.omega12

    @property
    def delta02(self) -> float:
        return self.delta01 + self.delta12

    @property
    def sign_triple(self) -> tuple[int, int, int]:
        return classify_signs(self)

    def swapped(self) -> "GapSchedule":
        """Exchange the roles of stage I and stage II (negates every delta)."""
        return GapSchedule(self.stage_ii, self.stage_i)


@dataclass(frozen=True)
class QutritState:
    """Diagonal populations plus the single e2/e0 coherence.

    ``coherence`` is the ``rho[E0, E2]`` entry, <e0|rho|e2>.  The e1 row and column carry
    no off-diagonal weight at second order.
    """

    p1: float
    p2: float
    coherence: complex = 0j

    def __post_init__(self):
        problems = self.violations()
        if problems:
            raise ValidationError(problems)

    def violations(self, prefix: str = "", tol: float = 1e-12) -> list[tuple[str, str]]:
        out = []
        if not self.p1 >= -tol:
            out.append((prefix + "p1", "must be non-negative"))
        if not self.p2 >= -tol:
            out.append((prefix + "p2", "must be non-negative"))
        if not self.p1 + self.p2 <= 1 + tol:
            out.append((prefix + "p1+p2", "must not exceed 1"))
        return out

    @property
    def p0(self) -> float:
        return 1.0 - self.p1 - self.p2

    def matrix(self) -> np.ndarray:
        rho = np.diag([self.p2, self.p1, self.p0]).astype(complex)
        rho[E0, E2] = self.coherence
        rho[E2, E0] = np.conj(self.coherence)
        return rho

    @classmethod
    def from_matrix(cls, rho: np.ndarray) -> "QutritState":
        rho = np.asarray(rho)
        return cls(p1=float(rho[E1, E1].real), p2=float(rho[E2, E2].real),
                   coherence=complex(rho[E0, E2]))

    def energy(self, g: GapConfig) -> float:
        return (self.p1 + self.p2) * g.omega01 + self.p2 * g.omega12


def jx_matrix() -> np.ndarray:
    """Spin-1 x operator in basis (e2, e1, e0); adjacent transitions only."""
    s = 1.0 / math.sqrt(2.0)
    jx = np.zeros((3, 3), dtype=complex)
    jx[E1, E0] = jx[E0, E1] = s
    jx[E2, E1] = jx[E1, E2] = s
    return jx


def interaction_jx(tau, g: GapConfig, exp: Callable = np.exp) -> np.ndarray:
    """Interaction-picture coupling operator J_x(tau) = e^{iHt} J_x e^{-iHt}.

    ``tau`` may be a scalar or a 1-D array; the result has shape
    ``(..., 3, 3)``.  Passing ``exp=sympy.exp`` together with symbolic
    arguments yields a symbolic matrix (object dtype).
    """
    if exp is np.exp:
        tau = np.asarray(tau, dtype=float)
        out = np.zeros(tau.shape + (3, 3), dtype=complex)
        s = 1.0 / math.sqrt(2.0)
        up01 = s * np.exp(1j * g.omega01 * tau)
        up12 = s * np.exp(1j * g.omega12 * tau)
        out[..., E1, E0] = up01
        out[..., E0, E1] = np.conj(up01)
        out[..., E2, E1] = up12
        out[..., E1, E2] = np.conj(up12)
        return out
    import sympy

    s = 1 / sympy.sqrt(2)
    I = sympy.I
    m = sympy.zeros(3, 3)
    m[E1, E0] = s * exp(I * g.omega01 * tau)
    m[E0, E1] = s * exp(-I * g.omega01 * tau)
    m[E2, E1] = s * exp(I * g.omega12 * tau)
    m[E1, E2] = s * exp(-I * g.omega12 * tau)
    return m


def free_hamiltonian(g: GapConfig) -> np.ndarray:
    """diag(omega02, omega01, 0) in basis (e2, e1, e0)."""
    return np.diag(np.array(g.energies, dtype=float))


def _sign(x: float) -> int:
    if x > 0:
        return 1
    if x < 0:
        return -1
    return 0


def classify_signs(s: GapSchedule) -> tuple[int, int, int]:
    """Sign triple of (d01, d12, d02).

    Raises ZeroDelta if any delta is exactly zero; such schedules must go
    through the degenerate (single-gap) path instead.
    """
    d01, d12 = s.delta01, s.delta12
    d02 = d01 + d12
    zero = [name for name, d in (("delta01", d01), ("delta12", d12), ("delta02", d02)) if d == 0]
    if zero:
        raise ZeroDelta(f"exactly zero gap change in {', '.join(zero)}")
    triple = (_sign(d01), _sign(d12), _sign(d02))
    assert triple in SIGN_TRIPLES, triple
    return triple


# --------------------------------------------------------------------------
# switching profiles


def _bump(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 0.5
    xi = x[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - 4.0 * xi * xi))
    return out


def _bump_derivative(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 0.5
    xi = x[inside]
    q = 1.0 - 4.0 * xi * xi
    out[inside] = np.exp(1.0 - 1.0 / q) * (-8.0 * xi / (q * q))
    return out


def shape_value(shape: str, x):
    """Unit-width switching function chi(x), peak value 1, symmetric about 0."""
    x = np.asarray(x, dtype=float)
    if shape == "gaussian":
        return np.exp(-x * x)
    if shape == "smooth_bump":
        return _bump(x)
    if shape == "rectangular":
        return (np.abs(x) <= 0.5).astype(float)
    raise ValueError(f"unknown switching shape {shape!r}")


def shape_derivative(shape: str, x):
    """chi'(x); zero almost everywhere for the rectangular shape."""
    x = np.asarray(x, dtype=float)
    if shape == "gaussian":
        return -2.0 * x * np.exp(-x * x)
    if shape == "smooth_bump":
        return _bump_derivative(x)
    if shape == "rectangular":
        return np.zeros_like(x)
    raise ValueError(f"unknown switching shape {shape!r}")


# Gaussian tails are cut at |x| = GAUSS_HALF_WIDTH (chi < 1e-15 beyond).
GAUSS_HALF_WIDTH = 6.0

_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)


def _composite_nodes(n_panels: int):
    """Gauss-Legendre nodes/weights on [-1, 1] split into equal panels."""
    edges = np.linspace(-1.0, 1.0, n_panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
    weights = (half[:, None] * _GL_W[None, :]).ravel()
    return nodes, weights


def overlap_profile(shape: str, x, k: float = 0.0):
    """Frequency-weighted switching overlap and its x-derivative.

    Returns ``(d, dd)`` with

        d(x; k) = int dy chi(y + x/2) chi(y - x/2) cos(k y)

    which is the centre-of-mass integral left after the change of variables
    u = tau - tau', s = (tau + tau')/2 (in units of sigma).  ``d`` is even in
    x.  For the rectangular shape ``dd`` at x = 0 is the right derivative.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    ax = np.abs(x)
    sgn = np.where(x >= 0, 1.0, -1.0)
    if shape == "gaussian":
        d = math.sqrt(math.pi / 2.0) * np.exp(-0.5 * x * x - k * k / 8.0)
        return d, -x * d
    if shape == "rectangular":
        h = np.clip(0.5 * (1.0 - ax), 0.0, None)
        if k == 0.0:
            d = 2.0 * h
            dd = np.where(ax < 1.0, -sgn, 0.0)
        else:
            d = 2.0 * np.sin(k * h) / k
            dd = np.where(ax < 1.0, -sgn * np.cos(k * h), 0.0)
        return d, dd
    if shape == "smooth_bump":
        n_panels = max(4, int(math.ceil(abs(k) / 3.0)))
        nodes, weights = _composite_nodes(n_panels)
        h = np.clip(0.5 * (1.0 - ax), 0.0, None)
        y = h[:, None] * nodes[None, :]
        w = h[:, None] * weights[None, :]
        xp = y + 0.5 * x[:, None]
        xm = y - 0.5 * x[:, None]
        cp, cm = _bump(xp), _bump(xm)
        ck = np.cos(k * y)
        d = np.sum(w * cp * cm * ck, axis=1)
        dd = 0.5 * np.sum(w * (_bump_derivative(xp) * cm - cp * _bump_derivative(xm)) * ck, axis=1)
        return d, dd
    raise ValueError(f"unknown switching shape {shape!r}")


def overlap_half_width(shape: str) -> float:
    """Largest |x| (in units of sigma) where the overlap is non-negligible."""
    return 2.0 * GAUSS_HALF_WIDTH if shape == "gaussian" else 1.0


@dataclass(frozen=True)
class SwitchingProfile:
    """chi((tau - center) / sigma) for one isochoric stroke."""

    shape: str = "smooth_bump"
    sigma: float = 1.0
    center: float = 0.0
    compact: bool = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        problems = self.violations()
        if problems:
            raise ValidationError(problems)
        object.__setattr__(self, "compact", self.shape != "gaussian")

    def violations(self, prefix: str = "") -> list[tuple[str, str]]:
        out = []
        if self.shape not in SHAPES:
            out.append((prefix + "shape", f"must be one of {', '.join(SHAPES)}"))
        if not (isinstance(self.sigma, (int, float)) and math.isfinite(self.sigma) and self.sigma > 0):
            out.append((prefix + "sigma", "must be a finite positive duration"))
        if not (isinstance(self.center, (int, float)) and math.isfinite(self.center)):
            out.append((prefix + "center", "must be finite"))
        return out

    def __call__(self, tau):
        return shape_value(self.shape, (np.asarray(tau, dtype=float) - self.center) / self.sigma)

    def support(self) -> tuple[float, float]:
        """Support interval; for the gaussian this is the truncation window."""
        half = GAUSS_HALF_WIDTH * self.sigma if self.shape == "gaussian" else 0.5 * self.sigma
        return self.center - half, self.center + half

    def nominal_support(self) -> tuple[float, float]:
        """[center - sigma/2, center + sigma/2], used for the disjointness rule."""
        return self.center - 0.5 * self.sigma, self.center + 0.5 * self.sigma
