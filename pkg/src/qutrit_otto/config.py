"""TOML run configuration.

Minimal example::

    omega01_i = 1.0
    omega12_i = 1.2
    omega01_ii = 0.8
    omega12_ii = 0.9

    [switching]          # shared by both stages unless overridden
    shape = "gaussian"
    sigma = 40.0
    center = 0.0         # stage I centre

    [correlator_i]
    kind = "inertial_thermal"
    temperature = 2.0

    [correlator_ii]
    kind = "inertial_thermal"
    temperature = 0.5

Optional: ``[switching.i]`` / ``[switching.ii]`` overrides, ``lambda``
(default 1e-2), ``[quad] rel_tol`` (1e-4) and ``max_depth`` (30),
``correlator_*.epsilon`` (default 1e-3 min(sigma, 1/Omega_02)),
``correlator_*.table`` (CSV path for ``user_tabulated``) and a ``[sweep]``
table mapping dotted keys to value lists or ``{start, stop, num}``.

Without an explicit stage-II centre the second window starts one sigma
after the first one's support ends.
"""

from __future__ import annotations

import copy
import math
import os
from dataclasses import dataclass, field

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from .correlators import KINDS, CorrelatorSpec, load_tabulated
from .cycle import CycleSetup
from .detector import SHAPES, GapConfig, GapSchedule, SwitchingProfile
from .dyson import DEFAULT_LAMBDA
from .errors import ParseError, ValidationError
from .quadrature import DEFAULT_MAX_DEPTH, DEFAULT_REL_TOL

GAP_KEYS = ("omega01_i", "omega12_i", "omega01_ii", "omega12_ii")
TOP_KEYS = set(GAP_KEYS) | {"lambda", "switching", "correlator_i", "correlator_ii", "quad",
                            "sweep", "output"}


@dataclass(frozen=True)
class RunConfig:
    correlator_i: CorrelatorSpec
    correlator_ii: CorrelatorSpec
    gaps: GapSchedule
    switching_i: SwitchingProfile
    switching_ii: SwitchingProfile
    coupling: float = DEFAULT_LAMBDA
    rel_tol: float = DEFAULT_REL_TOL
    max_depth: int = DEFAULT_MAX_DEPTH
    sweep: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict, repr=False, compare=False)
    base_dir: str = field(default=".", repr=False, compare=False)

    def setup(self) -> CycleSetup:
        return CycleSetup(self.correlator_i, self.correlator_ii, self.gaps, self.switching_i,
                          self.switching_ii, self.coupling, self.rel_tol, self.max_depth)


def _is_num(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _positive(errs, path, v):
    if not (_is_num(v) and v > 0):
        errs.append((path, "must be a finite positive number"))
        return False
    return True


def _switching(raw: dict, stage: str, errs: list) -> dict:
    base = raw.get("switching", {})
    if not isinstance(base, dict):
        errs.append(("switching", "must be a table"))
        base = {}
    merged = {k: v for k, v in base.items() if k not in ("i", "ii")}
    over = base.get(stage, {})
    if not isinstance(over, dict):
        errs.append((f"switching.{stage}", "must be a table"))
        over = {}
    merged.update(over)
    unknown = set(merged) - {"shape", "sigma", "center"}
    for key in sorted(unknown):
        errs.append((f"switching.{key}", "unknown key"))
    path = f"switching.{stage}" if over else "switching"
    shape = merged.get("shape", "smooth_bump")
    if shape not in SHAPES:
        errs.append((f"{path}.shape", f"must be one of {', '.join(SHAPES)}"))
    if "sigma" not in merged:
        errs.append((f"{path}.sigma", "is required"))
    else:
        _positive(errs, f"{path}.sigma", merged["sigma"])
    if "center" in merged and not _is_num(merged["center"]):
        errs.append((f"{path}.center", "must be finite"))
    return merged


def _correlator(raw: dict, name: str, errs: list, base_dir: str):
    sec = raw.get(name)
    if not isinstance(sec, dict):
        errs.append((name, "section is required"))
        return None
    kind = sec.get("kind")
    ok = True
    if kind not in KINDS:
        errs.append((f"{name}.kind", f"must be one of {', '.join(KINDS)}"))
        return None
    unknown = set(sec) - {"kind", "temperature", "acceleration", "epsilon", "table"}
    for key in sorted(unknown):
        errs.append((f"{name}.{key}", "unknown key"))
    if kind == "inertial_thermal":
        ok &= _positive(errs, f"{name}.temperature", sec.get("temperature"))
    if kind == "accelerated_vacuum":
        ok &= _positive(errs, f"{name}.acceleration", sec.get("acceleration"))
    eps = sec.get("epsilon")
    if eps is not None:
        ok &= _positive(errs, f"{name}.epsilon", eps)
    if kind == "user_tabulated":
        table = sec.get("table")
        if not isinstance(table, str):
            errs.append((f"{name}.table", "user_tabulated needs a CSV path"))
            return None
        if not ok:
            return None
        path = table if os.path.isabs(table) else os.path.join(base_dir, table)
        try:
            return load_tabulated(path, eps if eps is not None else 1e-3)
        except (OSError, ValueError) as exc:
            errs.append((f"{name}.table", str(exc)))
            return None
    if not ok:
        return None
    return CorrelatorSpec(kind, acceleration=sec.get("acceleration"),
                          temperature=sec.get("temperature"), epsilon=eps)


def _sweep(raw: dict, errs: list) -> dict:
    sec = raw.get("sweep", {})
    if not isinstance(sec, dict):
        errs.append(("sweep", "must be a table"))
        return {}
    axes = {}
    for key, spec in sec.items():
        path = f"sweep.{key}"
        if isinstance(spec, list):
            if not spec or not all(_is_num(v) for v in spec):
                errs.append((path, "must be a non-empty list of numbers"))
                continue
            axes[key] = [float(v) for v in spec]
        elif isinstance(spec, dict) and {"start", "stop", "num"} <= set(spec):
            if not (_is_num(spec["start"]) and _is_num(spec["stop"])
                    and isinstance(spec["num"], int) and spec["num"] >= 1):
                errs.append((path, "needs numeric start/stop and integer num >= 1"))
                continue
            axes[key] = [float(v) for v in np.linspace(spec["start"], spec["stop"], spec["num"])]
        else:
            errs.append((path, "must be a list or a {start, stop, num} table"))
    return axes


def validate(raw: dict, base_dir: str = ".") -> RunConfig:
    """Build a RunConfig from a parsed mapping, collecting every violation."""
    errs: list[tuple[str, str]] = []
    for key in sorted(set(raw) - TOP_KEYS):
        errs.append((key, "unknown key"))
    for key in GAP_KEYS:
        if key not in raw:
            errs.append((key, "is required"))
        else:
            _positive(errs, key, raw[key])
    coupling = raw.get("lambda", DEFAULT_LAMBDA)
    _positive(errs, "lambda", coupling)
    quad = raw.get("quad", {})
    if not isinstance(quad, dict):
        errs.append(("quad", "must be a table"))
        quad = {}
    rel_tol = quad.get("rel_tol", DEFAULT_REL_TOL)
    max_depth = quad.get("max_depth", DEFAULT_MAX_DEPTH)
    _positive(errs, "quad.rel_tol", rel_tol)
    if not (isinstance(max_depth, int) and not isinstance(max_depth, bool) and max_depth >= 1):
        errs.append(("quad.max_depth", "must be an integer >= 1"))

    sw_i = _switching(raw, "i", errs)
    sw_ii = _switching(raw, "ii", errs)
    c_i = _correlator(raw, "correlator_i", errs, base_dir)
    c_ii = _correlator(raw, "correlator_ii", errs, base_dir)
    sweep = _sweep(raw, errs)
    output = raw.get("output", {})
    if not isinstance(output, dict):
        errs.append(("output", "must be a table"))

    chi_i = chi_ii = None
    if not any(p.startswith("switching") for p, _ in errs):
        chi_i = SwitchingProfile(sw_i.get("shape", "smooth_bump"), float(sw_i["sigma"]),
                                 float(sw_i.get("center", 0.0)))
        explicit = "center" in raw.get("switching", {}).get("ii", {})
        if explicit:
            center_ii = float(sw_ii["center"])
        else:
            sigma_ii = float(sw_ii["sigma"])
            probe = SwitchingProfile(sw_ii.get("shape", "smooth_bump"), sigma_ii, 0.0)
            center_ii = chi_i.support()[1] - probe.support()[0] + max(chi_i.sigma, sigma_ii)
        chi_ii = SwitchingProfile(sw_ii.get("shape", "smooth_bump"), float(sw_ii["sigma"]),
                                  center_ii)
        if not chi_i.nominal_support()[1] < chi_ii.nominal_support()[0]:
            errs.append(("switching", "supports must be disjoint: center_i + sigma_i/2 < "
                                      "center_ii - sigma_ii/2"))
    if errs:
        raise ValidationError(list(dict.fromkeys(errs)))
    gaps = GapSchedule(GapConfig(float(raw["omega01_i"]), float(raw["omega12_i"])),
                       GapConfig(float(raw["omega01_ii"]), float(raw["omega12_ii"])))
    return RunConfig(c_i, c_ii, gaps, chi_i, chi_ii, float(coupling), float(rel_tol),
                     int(max_depth), sweep, dict(output), copy.deepcopy(raw), base_dir)


def parse_config(text: str, base_dir: str = ".") -> RunConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(str(exc)) from exc
    return validate(raw, base_dir)


def load_config(path: str) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_config(text, os.path.dirname(os.path.abspath(path)))


def with_override(raw: dict, dotted: str, value: float) -> dict:
    """Copy of ``raw`` with ``a.b.c = value`` set (used by sweeps)."""
    out = copy.deepcopy(raw)
    node = out
    parts = dotted.split(".")
    for part in parts[:-1]:
        node = node.setdefault(part, {})
    node[parts[-1]] = value
    return out
