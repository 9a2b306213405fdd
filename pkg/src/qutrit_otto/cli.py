"""Command-line entry point (``qutrit-otto``).

All numbers are written in full-precision scientific notation.  Failures
print a JSON object ``{"error", "message", "violations"}`` on stderr and
exit nonzero; ``oracle compare`` exits with status 3 when any draw misses
its tolerance.
"""

from __future__ import annotations

import concurrent.futures as cf
import csv
import functools
import io
import itertools
import json
import math
import sys

import click
import numpy as np

from . import dyson
from .config import RunConfig, load_config, validate, with_override
from .cycle import cycle_from_responses, stage_sets
from .errors import OttoError, ValidationError
from .pwc import pwc_report, region_grid

EXIT_ERROR = 1
EXIT_ORACLE_FAIL = 3


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "NaN"
        if math.isinf(x):
            return "Infinity" if x > 0 else "-Infinity"
        return format(x, ".16e")
    if x is None:
        return ""
    return str(x)


def to_json(obj, indent: int = 0) -> str:
    """Deterministic JSON with floats in scientific notation."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[" + ", ".join(to_json(v, indent + 1) for v in obj) + "]"
    if isinstance(obj, (complex, np.complexfloating)):
        return to_json([obj.real, obj.imag], indent)
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    return fmt(obj)


def emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def emit_table(header, rows, fmt_name: str, out):
    if fmt_name == "json":
        emit(to_json([dict(zip(header, r)) for r in rows]) + "\n", out)
    else:
        emit(rows_to_csv(header, rows), out)


def report_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (OttoError, ValueError, OSError, ArithmeticError) as exc:
            payload = {"error": type(exc).__name__, "message": str(exc)}
            if isinstance(exc, ValidationError):
                payload["violations"] = [{"path": p, "message": m} for p, m in exc.violations]
            click.echo(json.dumps(payload, sort_keys=True), err=True)
            sys.exit(EXIT_ERROR)
    return wrapper


out_opt = click.option("--out", type=click.Path(dir_okay=False), default=None,
                       help="Write to this file instead of stdout.")


def format_opt(default):
    return click.option("--format", "fmt_name", type=click.Choice(["csv", "json"]),
                        default=default, show_default=True)


config_opt = click.option("--config", "config_path", required=True,
                          type=click.Path(exists=True, dir_okay=False))


@click.group()
def main():
    """Qutrit Unruh-DeWitt Otto engine: responses, oracle, cycle and PWC."""


@main.group()
def response():
    """Response functions and coherence integrals."""


@response.command("compute")
@config_opt
@click.option("--stage", type=click.Choice(["I", "II", "both"]), default="both", show_default=True)
@out_opt
@format_opt("json")
@report_errors
def response_compute(config_path, stage, out, fmt_name):
    cfg = load_config(config_path)
    rs_i, rs_ii = stage_sets(cfg.setup())
    sets = {"I": rs_i.as_dict(), "II": rs_ii.as_dict()}
    if stage != "both":
        sets = {stage: sets[stage]}
    if fmt_name == "json":
        emit(to_json(sets) + "\n", out)
        return
    header, rows = None, []
    for d in sets.values():
        flat = {}
        for key, v in d.items():
            if isinstance(v, list):
                flat[f"re_{key}"], flat[f"im_{key}"] = v
            else:
                flat[key] = v
        header = list(flat)
        rows.append(list(flat.values()))
    emit(rows_to_csv(header, rows), out)


@main.group()
def oracle():
    """Brute-force second-order oracle."""


ORACLE_KEYS = ("delta_p1", "delta_p2", "re_c", "im_c")


@oracle.command("compare")
@click.option("--draws", type=click.IntRange(min=1), default=20, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--grid", "grid_n", type=click.IntRange(min=dyson.MIN_GRID), default=512,
              show_default=True, help="Fine proper-time grid size.")
@out_opt
@format_opt("csv")
@report_errors
def oracle_compare(draws, seed, grid_n, out, fmt_name):
    results = dyson.compare(draws=draws, seed=seed, grid_n=grid_n)
    header = ["index", "passed", "grid_n", "kind", "omega01", "omega12", "p1", "p2", "sigma",
              "temperature", "acceleration", "epsilon"]
    for k in ORACLE_KEYS:
        header += [f"closed_{k}", f"oracle_{k}", f"rel_err_{k}", f"tol_{k}"]
    header.append("error")
    rows = []
    for r in results:
        p = r.params
        row = [r.index, r.passed, r.grid_n, p["kind"], p["omega01"], p["omega12"], p["p1"], p["p2"],
               p["sigma"], p.get("temperature"), p.get("acceleration"), p["epsilon"]]
        for k in ORACLE_KEYS:
            row += [r.closed.get(k), r.oracle.get(k), r.rel_errors.get(k), r.tolerances.get(k)]
        row.append(r.error)
        rows.append(row)
    emit_table(header, rows, fmt_name, out)
    if not all(r.passed for r in results):
        sys.exit(EXIT_ORACLE_FAIL)


@main.group()
def cycle():
    """Four-stroke cycle evaluation and sweeps."""


def _run(cfg: RunConfig):
    setup = cfg.setup()
    rs_i, rs_ii = stage_sets(setup)
    ledger, closure = cycle_from_responses(rs_i, rs_ii, setup)
    report = pwc_report(rs_i, rs_ii, setup.switching_i.sigma, setup.switching_ii.sigma, setup.gaps)
    return ledger, closure, report


@cycle.command("run")
@config_opt
@out_opt
@format_opt("json")
@report_errors
def cycle_run(config_path, out, fmt_name):
    cfg = load_config(config_path)
    ledger, _, report = _run(cfg)
    data = ledger.as_dict()
    data["pwc_satisfied"] = report.pwc_satisfied
    if fmt_name == "json":
        emit(to_json(data) + "\n", out)
    else:
        flat = _flatten_ledger(data)
        emit(rows_to_csv(list(flat), [list(flat.values())]), out)


LEDGER_COLUMNS = ("w1", "q2", "w3", "q4", "w_ext", "delta_p1_i", "delta_p2_i", "delta_p1_ii",
                  "delta_p2_ii", "re_c_i", "im_c_i", "re_c_ii", "im_c_ii", "p1", "p2", "xi",
                  "first_law_residual", "w_ext_closed_form", "coherence_closed", "sign_triple",
                  "pwc_satisfied", "quad_error")


def _flatten_ledger(d: dict) -> dict:
    diag = d.get("diagnostics", {})
    flat = {k: d[k] for k in ("w1", "q2", "w3", "q4", "w_ext", "delta_p1_i", "delta_p2_i",
                              "delta_p1_ii", "delta_p2_ii")}
    flat.update(re_c_i=d["c_i"][0], im_c_i=d["c_i"][1], re_c_ii=d["c_ii"][0], im_c_ii=d["c_ii"][1])
    for k in ("p1", "p2", "xi", "first_law_residual", "w_ext_closed_form", "coherence_closed",
              "sign_triple"):
        flat[k] = diag.get(k)
    flat["pwc_satisfied"] = d.get("pwc_satisfied")
    flat["quad_error"] = diag.get("quad_error")
    return flat


def _sweep_axes(cfg: RunConfig, grid):
    axes = dict(cfg.sweep)
    if grid is not None:
        for key, spec in cfg.raw.get("sweep", {}).items():
            if isinstance(spec, dict):
                axes[key] = [float(v) for v in np.linspace(spec["start"], spec["stop"], grid)]
    return axes


def _sweep_point(cfg: RunConfig, keys, values):
    raw = dict(cfg.raw)
    raw.pop("sweep", None)
    for k, v in zip(keys, values):
        raw = with_override(raw, k, v)
    try:
        point = validate(raw, cfg.base_dir)
        ledger, _, report = _run(point)
        d = ledger.as_dict()
        d["pwc_satisfied"] = report.pwc_satisfied
        return _flatten_ledger(d), ""
    except (OttoError, ValueError, ArithmeticError) as exc:
        return None, f"{type(exc).__name__}: {exc}"


@cycle.command("sweep")
@config_opt
@click.option("--grid", type=click.IntRange(min=1), default=None,
              help="Points per {start, stop} sweep axis (overrides num).")
@out_opt
@format_opt("csv")
@report_errors
def cycle_sweep(config_path, grid, out, fmt_name):
    cfg = load_config(config_path)
    axes = _sweep_axes(cfg, grid)
    if not axes:
        raise ValidationError([("sweep", "config has no [sweep] axes")])
    keys = list(axes)
    points = list(itertools.product(*(axes[k] for k in keys)))
    workers = dyson.thread_count()
    if workers == 1:
        results = [_sweep_point(cfg, keys, p) for p in points]
    else:
        with cf.ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(lambda p: _sweep_point(cfg, keys, p), points))
    header = ["index", *keys, *LEDGER_COLUMNS, "error"]
    rows = []
    for i, (p, (flat, err)) in enumerate(zip(points, results)):
        values = [flat[c] for c in LEDGER_COLUMNS] if flat else [None] * len(LEDGER_COLUMNS)
        rows.append([i, *p, *values, err])
    emit_table(header, rows, fmt_name, out)


@main.group()
def pwc():
    """Positive work condition."""


@pwc.command("evaluate")
@config_opt
@out_opt
@format_opt("json")
@report_errors
def pwc_evaluate(config_path, out, fmt_name):
    cfg = load_config(config_path)
    _, _, report = _run(cfg)
    data = report.as_dict()
    if fmt_name == "json":
        emit(to_json(data) + "\n", out)
    else:
        emit(rows_to_csv(list(data), [list(data.values())]), out)


@pwc.command("region")
@click.option("--case", "case", required=True, help="Sign triple, e.g. +++ or +-pm.")
@click.option("--theta", type=float, required=True)
@click.option("--grid", type=click.IntRange(min=2), default=101, show_default=True,
              help="Points per axis.")
@click.option("--extent", type=float, default=1.0, show_default=True)
@out_opt
@format_opt("csv")
@report_errors
def pwc_region(case, theta, grid, extent, out, fmt_name):
    rows = region_grid(case, theta, extent, grid)
    emit_table(["s21", "s01", "satisfied"], rows, fmt_name, out)


if __name__ == "__main__":  # pragma: no cover
    main()
