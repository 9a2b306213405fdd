"""Brute-force second-order evolution of the full 3x3 density matrix.

The field is traced out analytically: a quasifree state only contributes
two-point functions at this order, so

    rho_1 = rho_0 + Tr_phi[U1 rho U1^dag] + Tr_phi[U2 rho] + Tr_phi[rho U2^dag]

reduces to double sums over a proper-time grid weighted by W.  Nothing here
uses the closed-form population or coherence expressions; the module exists
to check them.
"""

from __future__ import annotations

import concurrent.futures as cf
import math
import os
from dataclasses import dataclass

import numpy as np

from . import kernels
from .correlators import CorrelatorSpec, resolve, wightman
from .detector import E0, E1, E2, GapConfig, QutritState, SwitchingProfile, interaction_jx
from .errors import GridTooCoarse, PerturbativeBreakdown, ValidationError

DEFAULT_LAMBDA = 1e-2
MIN_GRID = 64
DRAW_EPS_FACTOR = 2e-3
POINTS_PER_EPS = 4.0


@dataclass(frozen=True)
class OracleResult:
    """Evolved matrix with a per-entry error estimate.

    ``rho_out`` takes the fine-grid trapezoid value on the diagonal and the
    Richardson value off the diagonal (see :func:`evolve_second_order`).
    """

    rho_out: np.ndarray
    error: np.ndarray
    rho_fine: np.ndarray
    rho_coarse: np.ndarray
    grid_n: int
    coupling: float

    def shifts(self, rho0: np.ndarray) -> dict:
        """delta p1, delta p2 and C = <e0|rho|e2> read off the evolved matrix."""
        d = self.rho_out - rho0
        return {"delta_p1": float(d[E1, E1].real), "delta_p2": float(d[E2, E2].real),
                "coherence": complex(d[E0, E2])}

    def shift_errors(self) -> dict:
        e = self.error
        return {"delta_p1": float(e[E1, E1]), "delta_p2": float(e[E2, E2]),
                "coherence": float(e[E0, E2])}


def _second_order(spec, chi, g, rho0, n, backend=None):
    lo, hi = chi.support()
    taus = np.linspace(lo, hi, n)
    h = taus[1] - taus[0]
    w = np.full(n, h)
    w[0] = w[-1] = 0.5 * h
    cw = w * chi(taus)
    jx = interaction_jx(taus, g)
    if spec.stationary:
        code = kernels.KIND_CODES[spec.kind]
        param = {"inertial_vacuum": 0.0, "accelerated_vacuum": spec.acceleration,
                 "inertial_thermal": spec.temperature}[spec.kind]
        return kernels.dyson_sums(taus, cw, jx, rho0, code, float(param or 0.0), spec.epsilon,
                                  backend=backend)
    wmat = wightman(spec, taus[:, None], taus[None, :])
    return kernels.dyson_sums_matrix(wmat, cw, jx, rho0)


def evolve_second_order(spec: CorrelatorSpec, chi: SwitchingProfile, g: GapConfig,
                        rho0: QutritState, coupling: float = DEFAULT_LAMBDA, grid_n: int = 512,
                        *, richardson_tol: float = 0.05, guard: float = 0.1,
                        backend: str | None = None) -> OracleResult:
    """Evolve a diagonal initial state through one switching window to O(lambda^2).

    The sums run on a fine trapezoid grid and on every other node of it.
    Diagonal entries are full-square sums of a smooth integrand (the two
    time orderings recombine), so the fine trapezoid converges spectrally
    and is used as is, with |fine - coarse| as a conservative error.  The
    e0/e2 entry keeps a genuine time-ordered step, whose trapezoid error is
    O(h^2); there the Richardson value (4 fine - coarse) / 3 is used, with
    |Richardson - fine| as the error.
    """
    if grid_n < MIN_GRID:
        raise ValidationError([("grid_n", f"must be >= {MIN_GRID}")])
    if abs(rho0.coherence) != 0:
        raise ValidationError([("rho0", "initial state must be diagonal")])
    spec = resolve(spec, chi.sigma, g.omega02)
    r0 = rho0.matrix()
    lam2 = coupling * coupling
    n_fine = grid_n | 1  # odd, so the coarse grid is every other node

    def delta(n):
        m1, m2 = _second_order(spec, chi, g, r0, n, backend)
        return lam2 * (m1 + m2 + m2.conj().T)

    fine = delta(n_fine)
    coarse = delta((n_fine + 1) // 2)
    extrap = (4.0 * fine - coarse) / 3.0
    diag = np.eye(3, dtype=bool)
    best = np.where(diag, fine, extrap)
    err = np.where(diag, np.abs(fine - coarse), np.abs(extrap - fine))
    size = np.max(np.abs(best))
    if size > guard:
        raise PerturbativeBreakdown(f"second-order shift {size:.3g} exceeds guard {guard}")
    if size > 0 and np.max(err) > richardson_tol * size:
        raise GridTooCoarse(f"discretisation error {np.max(err):.3g} vs shift {size:.3g} "
                            f"at grid_n={n_fine}")
    return OracleResult(r0 + best, err, r0 + fine, r0 + coarse, n_fine, coupling)


# --------------------------------------------------------------------------
# randomized comparison against the closed forms


@dataclass(frozen=True)
class DrawResult:
    index: int
    params: dict
    closed: dict
    oracle: dict
    rel_errors: dict
    tolerances: dict
    passed: bool
    error: str = ""
    grid_n: int = 0


def random_draw(rng: np.random.Generator) -> dict:
    """One parameter draw for the oracle comparison."""
    kind = "inertial_thermal" if rng.random() < 0.5 else "accelerated_vacuum"
    params = {
        "kind": kind,
        "omega01": float(rng.uniform(0.3, 1.5)),
        "omega12": float(rng.uniform(0.3, 1.5)),
        "p1": None,
        "p2": None,
        "sigma": float(rng.uniform(1.0, 2.0)),
        "shape": "smooth_bump",
    }
    p = rng.dirichlet([1.0, 1.0, 1.0])
    params["p1"], params["p2"] = float(p[1]), float(p[2])
    if kind == "inertial_thermal":
        params["temperature"] = float(rng.uniform(0.3, 2.0))
    else:
        params["acceleration"] = float(rng.uniform(0.5, 6.0))
    # small enough that e^{Omega eps} stays ~1; the grid is sized to resolve it
    params["epsilon"] = DRAW_EPS_FACTOR * min(params["sigma"], 1.0 / (params["omega01"] + params["omega12"]))
    return params


def grid_for(sigma: float, epsilon: float, minimum: int) -> int:
    """Fine grid size giving POINTS_PER_EPS nodes per regulator width over [-sigma/2, sigma/2]."""
    n = max(minimum, int(math.ceil(POINTS_PER_EPS * sigma / epsilon)))
    return n + (n % 2)


def _spec_from(params: dict) -> CorrelatorSpec:
    return CorrelatorSpec(params["kind"], acceleration=params.get("acceleration"),
                          temperature=params.get("temperature"), epsilon=params["epsilon"])


def compare_draw(index: int, params: dict, coupling: float = DEFAULT_LAMBDA, grid_n: int = 512,
                 rel_floor: float = 0.01, rel_tol: float = 1e-8) -> DrawResult:
    """Closed-form stroke-2 shifts vs the brute-force oracle for one draw."""
    from .cycle import isochoric_heat
    from .response import stage_response_set

    spec = _spec_from(params)
    chi = SwitchingProfile(params["shape"], params["sigma"], 0.0)
    g = GapConfig(params["omega01"], params["omega12"])
    state = QutritState(params["p1"], params["p2"])
    try:
        rs = stage_response_set(spec, chi, g, "I", rel_tol=rel_tol)
        heat = isochoric_heat(rs, state, g, chi.sigma, coupling)
        n = grid_for(chi.sigma, spec.epsilon, grid_n) if chi.compact else grid_n
        res = evolve_second_order(spec, chi, g, state, coupling, n)
    except Exception as exc:  # reported per draw, never dropped
        return DrawResult(index, params, {}, {}, {}, {}, False, f"{type(exc).__name__}: {exc}")
    orc = res.shifts(state.matrix())
    oerr = res.shift_errors()
    closed = {"delta_p1": heat.delta_p1, "delta_p2": heat.delta_p2,
              "re_c": heat.coherence.real, "im_c": heat.coherence.imag}
    oracle = {"delta_p1": orc["delta_p1"], "delta_p2": orc["delta_p2"],
              "re_c": orc["coherence"].real, "im_c": orc["coherence"].imag}
    oracle_err = {"delta_p1": oerr["delta_p1"], "delta_p2": oerr["delta_p2"],
                  "re_c": oerr["coherence"], "im_c": oerr["coherence"]}
    scale = 0.5 * coupling ** 2 * chi.sigma
    closed_err = {"delta_p1": scale * 2 * rs.quad_error, "delta_p2": scale * rs.quad_error,
                  "re_c": scale * rs.quad_error, "im_c": scale * rs.quad_error}
    # Re C and Im C are measured against |C| so a near-zero component is not
    # judged by its own tiny magnitude.
    denom = {"delta_p1": abs(closed["delta_p1"]), "delta_p2": abs(closed["delta_p2"]),
             "re_c": abs(heat.coherence), "im_c": abs(heat.coherence)}
    rel, tols = {}, {}
    ok = True
    for key in closed:
        d = max(denom[key], 1e-300)
        rel[key] = abs(closed[key] - oracle[key]) / d
        tols[key] = max(rel_floor, 3.0 * (closed_err[key] + oracle_err[key]) / d)
        ok &= rel[key] <= tols[key]
    return DrawResult(index, params, closed, oracle, rel, tols, bool(ok), "", res.grid_n)


def thread_count() -> int:
    env = os.environ.get("OTTO_QUTRIT_THREADS")
    if env:
        return max(1, int(env))
    return max(1, min(8, os.cpu_count() or 1))


def compare(draws: int = 20, seed: int = 0, coupling: float = DEFAULT_LAMBDA,
            grid_n: int = 512) -> list[DrawResult]:
    """Run ``draws`` independent comparisons; results are ordered by draw index."""
    rng = np.random.default_rng(seed)
    params = [random_draw(rng) for _ in range(draws)]
    workers = thread_count()
    if workers == 1:
        return [compare_draw(i, p, coupling, grid_n) for i, p in enumerate(params)]
    with cf.ThreadPoolExecutor(workers) as pool:
        futures = [pool.submit(compare_draw, i, p, coupling, grid_n) for i, p in enumerate(params)]
        return [f.result() for f in futures]
