"""Command-line frontend: calibrate, test, select, and simulate workflows.

Machine-readable output goes to stdout and is a pure function of the inputs,
flags, and seed; floats are printed with 17 significant digits so every value
round-trips. Human-readable notes (wall time) go to stderr. Exit codes:
0 success, 2 invalid input, 3 numerical failure.
"""

import argparse
import csv
import json
import sys
import time

import numpy as np

from . import sim
from .corr import build_model
from .dist import chi2_sf, f_sf
from .errors import NumericalError
from .procedure import MethodKind, calibrated_method, stepup
from .varselect import (
    RegressionProblem,
    ols_fit,
    select_variables,
    selection_weights,
    t_squared,
)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3

_TSV_COLUMNS = (
    "d", "rho_or_spec", "method", "alpha", "fdr_direct", "se_direct",
    "fdr_loo", "se_loo", "power", "reps", "seed",
)


def _format_float(x: float) -> str:
    return format(float(x), ".17g")


def _render_json(value, indent=0) -> str:
    """JSON text with floats at 17 significant digits (round-trip safe)."""
    pad = "  " * indent
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = ",\n".join(
            f'{pad}  {json.dumps(str(k))}: {_render_json(v, indent + 1)}'
            for k, v in value.items()
        )
        return "{\n" + items + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if len(value) == 0:
            return "[]"
        items = ",\n".join(f"{pad}  {_render_json(v, indent + 1)}" for v in value)
        return "[\n" + items + "\n" + pad + "]"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _format_float(value)
    if value is None:
        return "null"
    return json.dumps(value)


def _emit(document: dict, stream) -> None:
    print(_render_json(document), file=stream)


def read_matrix_csv(path) -> np.ndarray:
    """Read a comma-separated numeric matrix; a header row is auto-detected."""
    rows = []
    try:
        with open(path, newline="") as handle:
            for row in csv.reader(handle):
                cells = [c.strip() for c in row if c.strip() != ""]
                if cells:
                    rows.append(cells)
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise ValueError(f"{path} contains no data")

    def parse(cells):
        return [float(c) for c in cells]

    try:
        parse(rows[0])
        start = 0
    except ValueError:
        start = 1  # header row
    if start >= len(rows):
        raise ValueError(f"{path} contains a header but no data rows")
    try:
        data = [parse(r) for r in rows[start:]]
    except ValueError as exc:
        raise ValueError(f"{path} has a non-numeric cell: {exc}") from exc
    widths = {len(r) for r in data}
    if len(widths) != 1:
        raise ValueError(f"{path} has ragged rows with widths {sorted(widths)}")
    return np.array(data, dtype=float)


def read_vector_csv(path) -> np.ndarray:
    """Read a vector stored as a single CSV row or column."""
    matrix = read_matrix_csv(path)
    if 1 not in matrix.shape:
        raise ValueError(f"{path} is not a vector: shape {matrix.shape}")
    return matrix.reshape(-1)


def _method_from_args(args) -> MethodKind:
    if args.mode == "z":
        if getattr(args, "m", None) is not None:
            raise ValueError("--m applies only to --mode t")
        return MethodKind.z()
    if args.m is None:
        raise ValueError("--mode t requires --m")
    return MethodKind.t(args.m)


def cmd_calibrate(args) -> int:
    sigma = read_matrix_csv(args.sigma)
    kind = _method_from_args(args)
    model = build_model(sigma)
    cm = calibrated_method(model.weights, args.alpha, kind)
    document = {
        "schema_version": SCHEMA_VERSION,
        "command": "calibrate",
        "dimension": model.dimension,
        "mode": kind.kind,
        "alpha": args.alpha,
        "weights": list(model.weights),
        "alpha1": cm.alpha1,
        "critical_constants": list(cm.critical_constants),
        "calibration_residual": cm.residual,
    }
    if kind.kind == "t":
        document["m"] = kind.m
    _emit(document, sys.stdout)
    return EXIT_OK


def cmd_test(args) -> int:
    sigma = read_matrix_csv(args.sigma)
    x = read_vector_csv(args.stats)
    kind = _method_from_args(args)
    if kind.kind == "t" and args.v is None:
        raise ValueError("--mode t requires --v")
    model = build_model(sigma)
    if x.shape != (model.dimension,):
        raise ValueError(f"stats length {x.size} does not match matrix dimension {model.dimension}")

    z = x / np.sqrt(np.diagonal(model.sigma))
    if kind.kind == "z":
        raw_stats = z * z
        p_raw = chi2_sf(raw_stats, 1.0)
    else:
        if not args.v > 0:
            raise ValueError(f"--v must be positive, got {args.v!r}")
        raw_stats = kind.m * z * z / args.v
        p_raw = f_sf(raw_stats, 1.0, kind.m)
    cm = calibrated_method(model.weights, args.alpha, kind)
    weighted = raw_stats / cm.weights
    p_tilde = kind.null_sf(weighted)
    outcome = stepup(p_tilde, cm.critical_constants)

    document = {
        "schema_version": SCHEMA_VERSION,
        "command": "test",
        "dimension": model.dimension,
        "mode": kind.kind,
        "alpha": args.alpha,
        "alpha1": cm.alpha1,
        "weights": list(model.weights),
        "p_values": list(np.atleast_1d(p_raw)),
        "transformed_p_values": list(np.atleast_1d(p_tilde)),
        "rejections": outcome.R,
        "rejected_indices": list(outcome.rejected),
        "threshold": outcome.threshold,
    }
    if kind.kind == "t":
        document["m"] = kind.m
        document["v"] = args.v
    _emit(document, sys.stdout)
    return EXIT_OK


def cmd_select(args) -> int:
    design = read_matrix_csv(args.design)
    response = read_vector_csv(args.response)
    problem = RegressionProblem(design, response)
    fit = ols_fit(problem)
    stats = t_squared(fit)
    weights = selection_weights(fit)
    outcome = select_variables(problem, args.alpha)
    document = {
        "schema_version": SCHEMA_VERSION,
        "command": "select",
        "n": problem.n,
        "d": problem.d,
        "alpha": args.alpha,
        "beta_hat": list(fit.beta_hat),
        "tau2_hat": fit.tau2_hat,
        "dof": fit.dof,
        "weights": list(weights),
        "t_squared": list(stats),
        "selected_count": outcome.R,
        "selected_indices": list(outcome.rejected),
        "threshold": outcome.threshold,
    }
    _emit(document, sys.stdout)
    return EXIT_OK


def _parse_scenario_file(path, reps_override, seed_override) -> sim.Scenario:
    try:
        with open(path) as handle:
            raw = json.load(handle)
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ValueError(f"{path} must contain a JSON object")

    def require(key):
        if key not in raw:
            raise ValueError(f"scenario file is missing {key!r}")
        return raw[key]

    d = require("dimension")
    cov_raw = require("covariance")
    if not isinstance(cov_raw, dict) or "kind" not in cov_raw:
        raise ValueError("covariance must be an object with a 'kind' field")
    kind = cov_raw["kind"]
    if kind == "identity":
        covariance = sim.CovarianceSpec.identity()
    elif kind == "equicorrelated":
        covariance = sim.CovarianceSpec.equicorrelated(cov_raw["rho"])
    elif kind == "matrix":
        covariance = sim.CovarianceSpec.explicit(cov_raw["values"])
    elif kind == "random_pd":
        covariance = sim.CovarianceSpec.random_pd(cov_raw["seed"])
    else:
        raise ValueError(f"unknown covariance kind {kind!r}")

    method_raw = require("method")
    if not isinstance(method_raw, dict) or method_raw.get("kind") not in ("z", "t"):
        raise ValueError("method must be an object with kind 'z' or 't'")
    if method_raw["kind"] == "z":
        method = MethodKind.z()
    else:
        method = MethodKind.t(method_raw["m"])

    signal = raw.get("signal", 3.0)
    if isinstance(signal, list):
        signal = tuple(float(s) for s in signal)

    return sim.Scenario(
        dimension=int(d),
        covariance=covariance,
        null_indices=tuple(int(i) for i in require("null_indices")),
        signal=signal,
        method=method,
        alpha=float(require("alpha")),
        replications=int(reps_override if reps_override is not None else require("replications")),
        seed=int(seed_override if seed_override is not None else require("seed")),
    )


def _report_tsv(report: sim.SimulationReport) -> str:
    scenario = report.scenario
    method = scenario["method"]
    if method == "t":
        method = f"t({scenario['m']:g})"
    cells = (
        str(scenario["dimension"]),
        scenario["covariance"],
        method,
        _format_float(scenario["alpha"]),
        _format_float(report.direct.mean_fdp),
        _format_float(report.direct.std_error),
        _format_float(report.leave_one_out.mean_fdp),
        _format_float(report.leave_one_out.std_error),
        _format_float(report.power),
        str(scenario["replications"]),
        str(scenario["seed"]),
    )
    return "\t".join(_TSV_COLUMNS) + "\n" + "\t".join(cells)


def _report_json(report: sim.SimulationReport) -> dict:
    def estimate(e):
        return {
            "mean_fdp": e.mean_fdp,
            "std_error": e.std_error,
            "replications": e.replications,
            "estimator": e.estimator,
        }

    return {
        "schema_version": SCHEMA_VERSION,
        "command": "simulate",
        "scenario": report.scenario,
        "fdr_direct": estimate(report.direct),
        "fdr_leave_one_out": estimate(report.leave_one_out),
        "power": report.power,
        "plain_bh": estimate(report.plain),
        "failures": report.failures,
    }


def cmd_simulate(args) -> int:
    scenario = _parse_scenario_file(args.scenario, args.reps, args.seed)
    started = time.perf_counter()
    report = sim.simulate_report(scenario, workers=args.workers)
    if args.format == "tsv":
        print(_report_tsv(report))
    else:
        _emit(_report_json(report), sys.stdout)
    print(f"completed in {time.perf_counter() - started:.2f}s", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wbh",
        description=(
            "Weighted step-up procedures for FDR-controlled multiple testing "
            "of correlated normal means, with variable selection and a "
            "Monte Carlo validation harness."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    cal = sub.add_parser("calibrate", help="solve the base constant for a covariance matrix")
    cal.add_argument("--sigma", required=True, help="covariance matrix CSV")
    cal.add_argument("--alpha", type=float, required=True)
    cal.add_argument("--mode", choices=("z", "t"), required=True)
    cal.add_argument("--m", type=float, help="denominator dof for --mode t")
    cal.set_defaults(func=cmd_calibrate)

    tst = sub.add_parser("test", help="run the weighted step-up test on observed statistics")
    tst.add_argument("--sigma", required=True, help="covariance matrix CSV")
    tst.add_argument("--stats", required=True, help="observation vector CSV")
    tst.add_argument("--alpha", type=float, required=True)
    tst.add_argument("--mode", choices=("z", "t"), required=True)
    tst.add_argument("--m", type=float, help="denominator dof for --mode t")
    tst.add_argument("--v", type=float, help="scale statistic for --mode t")
    tst.set_defaults(func=cmd_test)

    sel = sub.add_parser("select", help="FDR-controlled variable selection by least squares")
    sel.add_argument("--design", required=True, help="design matrix CSV")
    sel.add_argument("--response", required=True, help="response vector CSV")
    sel.add_argument("--alpha", type=float, required=True)
    sel.set_defaults(func=cmd_select)

    simu = sub.add_parser("simulate", help="Monte Carlo FDR/power estimation for a scenario")
    simu.add_argument("--scenario", required=True, help="scenario JSON file")
    simu.add_argument("--reps", type=int, help="override the scenario's replication count")
    simu.add_argument("--seed", type=int, help="override the scenario's base seed")
    simu.add_argument("--workers", type=int, default=1)
    simu.add_argument("--format", choices=("json", "tsv"), default="json")
    simu.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
