"""Command line driver.

Subcommands consume a JSON experiment config and write a self-describing
result bundle (JSON) plus bulk tables (CSV) atomically into the output
directory. Exit codes: 0 success, 2 config error, 3 infeasible parameters,
4 numeric-diagnostic failure.

The worker-count environment variable ISORATE_WORKERS is honored for
replicate evaluation only; results are identical for every worker count
because each replicate is derived from (seed, replicate index).
"""

import argparse
import json
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .errors import ConfigError, ConstructionInfeasibleError, DiagnosticError, InfeasibleRateError
from .experiments import (
    fit_loglog_slope,
    rate_table,
    run_coverage_cell,
    run_minimax,
)
from .funcspace import load_spec
from .limitdist import LimitProcessSpec, simulate_slope_at_zero
from .minimax import ModelSetup
from .models import DesignSpec
from .stochastic import SeedSpec

SCHEMA_VERSION = 1

_MISSING = object()


def _atomic_write(path, text):
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".isorate-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, payload):
    _atomic_write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def _field(cfg, name, kind, default=_MISSING):
    if name not in cfg:
        if default is _MISSING:
            raise ConfigError("required field is missing", field=name)
        return default
    value = cfg[name]
    if kind is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if kind is int and isinstance(value, int) and not isinstance(value, bool):
        return value
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise ConfigError(f"expected {kind.__name__}, got {type(value).__name__}", field=name)
    return value


def _setup_from(cfg, model):
    design_cfg = _field(cfg, "design", dict, {"kind": "uniform", "lo": -1.0, "hi": 1.0})
    try:
        design = DesignSpec(**design_cfg)
    except TypeError as exc:
        raise ConfigError(str(exc), field="design") from None
    return ModelSetup(
        model=model,
        size=_field(cfg, "size", float),
        sigma=_field(cfg, "sigma", float, 1.0),
        error_kind=_field(cfg, "error_kind", str, "gaussian"),
        design=design,
        grid_points=_field(cfg, "grid_points", int, 1000),
    )


def _echo(cfg, command, seed, extra=None):
    echoed = {"schema_version": SCHEMA_VERSION, "command": command, **cfg, "seed": seed}
    if extra:
        echoed.update(extra)
    return echoed


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_rates(cfg, seed, out):
    spec = load_spec(_field(cfg, "f0", dict))
    C = _field(cfg, "C", float)
    ns = _field(cfg, "n_values", list)
    rows = rate_table(spec, C, ns)
    slope = fit_loglog_slope([r["n"] for r in rows], [r["a"] for r in rows]) if len(rows) >= 2 else None
    bundle = {
        "schema_version": SCHEMA_VERSION,
        "config": _echo(cfg, "rates", seed),
        "results": {"table": rows, "loglog_slope_a": slope},
        "diagnostics": {},
    }
    header = list(rows[0].keys())
    write_csv(os.path.join(out, "rates.csv"), header, [[r[k] for k in header] for r in rows])
    write_json(os.path.join(out, "result.json"), bundle)
    return bundle


def _cmd_estimate(cfg, seed, out):
    spec = load_spec(_field(cfg, "f0", dict))
    setup = _setup_from(cfg, _field(cfg, "model", str))
    draw = setup.simulate(spec, SeedSpec(seed))
    value = setup.estimate(draw)
    draw.to_csv(os.path.join(out, "draw.csv"))
    bundle = {
        "schema_version": SCHEMA_VERSION,
        "config": _echo(cfg, "estimate", seed, {"grid_points": setup.grid_points,
                                                "sigma": setup.sigma,
                                                "error_kind": setup.error_kind}),
        "results": {"estimate": value, "interior": setup.interior(draw)},
        "diagnostics": {},
    }
    write_json(os.path.join(out, "result.json"), bundle)
    return bundle


def _cmd_simulate_limit(cfg, seed, out):
    spec = LimitProcessSpec(
        alpha_rv=_field(cfg, "alpha_rv", float),
        gamma=_field(cfg, "gamma", float, 1.0),
        window=_field(cfg, "window", float, 8.0),
        step=_field(cfg, "step", float, 2e-3),
        far_window=_field(cfg, "far_window", float, 32768.0),
    )
    reps = _field(cfg, "reps", int)
    sample = simulate_slope_at_zero(spec, reps, SeedSpec(seed))
    write_csv(
        os.path.join(out, "slopes.csv"),
        ["replicate", "slope_pos", "slope_neg", "touched_boundary"],
        [[i, float(sample.slope_pos[i]), float(sample.slope_neg[i]), int(sample.touched_boundary[i])]
         for i in range(reps)],
    )
    bundle = {
        "schema_version": SCHEMA_VERSION,
        "config": _echo(cfg, "simulate-limit", seed, {
            "window": spec.window, "step": spec.step, "far_window": spec.far_window}),
        "results": {
            "p_positive": float(np.mean(sample.slope_pos > 0.0)),
            "p_negative": float(np.mean(sample.slope_neg < 0.0)),
            "mean_slope_pos": float(np.mean(sample.slope_pos)),
        },
        "diagnostics": {"touch_fraction": sample.touch_fraction,
                        "truncation_warning": sample.truncation_warning},
    }
    write_json(os.path.join(out, "result.json"), bundle)
    if sample.truncation_warning:
        raise DiagnosticError(
            f"truncation diagnostic breached: {sample.touch_fraction:.2%} of slope "
            "segments touch the window edge (outputs were written)")
    return bundle


def _cmd_coverage(cfg, seed, out):
    spec = load_spec(_field(cfg, "f0", dict))
    model = _field(cfg, "model", str)
    sizes = _field(cfg, "sizes", list)
    reps = _field(cfg, "reps", int)
    C = _field(cfg, "C", float)
    workers = max(1, int(os.environ.get("ISORATE_WORKERS", "1")))
    cells = []
    setup = None
    for j, size in enumerate(sizes):
        setup = _setup_from({**cfg, "size": float(size)}, model)
        cells.append(run_coverage_cell(spec, setup, C, reps, SeedSpec(seed, j * reps),
                                       workers=workers))
    rows = [c.row() for c in cells]
    header = list(rows[0].keys())
    write_csv(os.path.join(out, "coverage.csv"), header, [[r[k] for k in header] for r in rows])
    bundle = {
        "schema_version": SCHEMA_VERSION,
        "config": _echo(cfg, "coverage", seed, {"sigma": setup.sigma,
                                                "error_kind": setup.error_kind,
                                                "grid_points": setup.grid_points,
                                                "reps": reps}),
        "results": {"cells": rows},
        "diagnostics": {"max_drop_rate": max((c.dropped / reps for c in cells), default=0.0)},
    }
    write_json(os.path.join(out, "result.json"), bundle)
    return bundle


def _cmd_minimax(cfg, seed, out):
    spec = load_spec(_field(cfg, "f0", dict))
    setup = _setup_from(cfg, _field(cfg, "model", str))
    alpha = _field(cfg, "alpha", float, 0.2)
    beta = _field(cfg, "beta", float, 0.25)
    report = run_minimax(
        spec, setup,
        alpha_level=alpha,
        beta=beta,
        reps=_field(cfg, "reps", int),
        seed=SeedSpec(seed),
        collect_errors=True,
        C=_field(cfg, "C", float, None),
    )
    errors = report.pop("errors")
    write_csv(os.path.join(out, "errors.csv"),
              ["replicate", "hypothesis", "estimator", "error"],
              [[r["replicate"], r["hypothesis"], r["estimator"], r["error"]] for r in errors])
    bundle = {
        "schema_version": SCHEMA_VERSION,
        "config": _echo(cfg, "minimax", seed, {"alpha": alpha, "beta": beta,
                                               "sigma": setup.sigma,
                                               "error_kind": setup.error_kind,
                                               "grid_points": setup.grid_points}),
        "results": report,
        "diagnostics": {"experimental_alternative": report["experimental"]},
    }
    write_json(os.path.join(out, "result.json"), bundle)
    return bundle


_COMMANDS = {
    "rates": _cmd_rates,
    "estimate": _cmd_estimate,
    "simulate-limit": _cmd_simulate_limit,
    "coverage": _cmd_coverage,
    "minimax": _cmd_minimax,
}


# ---------------------------------------------------------------------------
# plot data extraction
# ---------------------------------------------------------------------------

def emit_plotdata(bundle, kind):
    """Two-column (x, y) rows extracted from a result bundle.

    kinds: "survival" and "cdf" need a slope/error sample table;
    "loglog-rate" needs a rates table.
    """
    results = bundle.get("results", {})
    if kind == "loglog-rate":
        table = results.get("table")
        if not table:
            raise ConfigError("bundle has no rates table", field="results.table")
        return [(float(np.log10(r["n"])), float(np.log10(r["a"]))) for r in table]
    sample = results.get("sample")
    if sample is None and "cells" not in results:
        raise ConfigError("bundle has no sample table", field="results.sample")
    values = np.sort(np.asarray(sample, dtype=np.float64))
    if values.size == 0:
        raise ConfigError("sample table is empty", field="results.sample")
    n = values.size
    if kind == "cdf":
        return [(float(v), (i + 1) / n) for i, v in enumerate(values)]
    if kind == "survival":
        return [(float(v), 1.0 - i / n) for i, v in enumerate(values)]
    raise ConfigError(f"unknown plot kind {kind!r}", field="plot")


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _parse_args(argv):
    parser = argparse.ArgumentParser(prog="isorate", description=__doc__)
    parser.add_argument("--version", action="version", version=f"isorate {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--reps", type=int, default=None, help="override the config replicate count")
        p.add_argument("--out", default=None, help="output directory (default isorate-out)")
    return parser.parse_args(argv)


def main(argv=None):
    args = _parse_args(sys.argv[1:] if argv is None else argv)
    try:
        with open(args.config) as fh:
            text = fh.read()
        try:
            cfg = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
                              field="config")
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object", field="config")
        if args.reps is not None:
            cfg["reps"] = args.reps
        seed = args.seed if args.seed is not None else _field(cfg, "seed", int, 0)
        out = args.out or cfg.get("out") or "isorate-out"
        os.makedirs(out, exist_ok=True)
        _COMMANDS[args.command](cfg, seed, out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (InfeasibleRateError, ConstructionInfeasibleError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 3
    except DiagnosticError as exc:
        print(f"diagnostic failure: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
