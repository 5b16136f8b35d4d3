# MIT License
#
# Copyright (c) 2025 Balanced Shrinkage Contributors
#
# Permission is hereby granted, free of charge, to any person obtaining a copy
# of this software and associated documentation files (the "Software"), to deal
# in the Software without restriction, including without limitation the rights
# to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
# copies of the Software, and to permit persons to whom the Software is
# furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included in
# all copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
# OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
# SOFTWARE.


"""
Command-line frontend.

    balanced-shrinkage risk      one exact or simulated risk value
    balanced-shrinkage table     published tables (--table N) or a custom grid
    balanced-shrinkage curve     risk ratios along a lambda grid (--figure N)
    balanced-shrinkage simulate  Monte Carlo risks for several families
    balanced-shrinkage verify    run the verification suites

Exit codes: 0 success, 1 verification failure, 2 usage or environment error.

CSV output uses a decimal point, no thousands separators, LF line endings
and UTF-8; computed values are written with 6 significant digits. Every
file written is accompanied by a ``.manifest`` (key = value) recording the
resolved settings, the convention and the library versions.
"""

import argparse
import csv
import datetime
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import scipy
from configobj import ConfigObj

from . import __version__, config, estimators, reference
from .config import ExperimentConfig, METHOD_EXACT, METHOD_MC, parse_degree
from .errors import ShrinkageError
from .estimators import CoefficientConvention
from .log import configure, log, LOG_INFO, LOG_NOTICE, LOG_WARNING
from .montecarlo import SimulationPlan, mc_report, simulate_risk
from .ncx2 import DEFAULT_CONTROL
from .risk import exact_risk_general
from .verify import run_verification

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2

RISK_COLUMNS = ["p", "omega", "lambda", "degree", "convention", "method", "risk", "ratio", "stderr"]


class UsageError(ShrinkageError):
    """Invalid or missing command-line input."""


def _fmt(value):
    return f"{value:.6g}"


def _echo(value):
    """Input values are echoed in shortest form."""
    return f"{float(value):g}"


def _degree_label(degree):
    return {0: "MLE", 1: "JS"}.get(degree, str(degree))


def _convention_label(degree, conv):
    return conv.value if degree >= 2 else ""


def _single(value, name):
    items = config.as_list(value)
    if len(items) != 1:
        raise UsageError(f"--{name} needs exactly one value, got {value!r}")
    return items[0]


def _require(settings, *keys):
    for key in keys:
        if settings.get(key) in (None, "", []):
            raise UsageError(f"missing required setting '{key}' (flag --{key.replace('_', '-')} or config file)")


# ============================================================================
# Output
# ============================================================================

def _output_base(settings, out_dir, default_name):
    """Resolve --output (name or path, with or without .csv) against the output directory."""
    name = settings.get("output") or default_name
    if name.endswith(".csv"):
        name = name[:-4]
    if not os.path.isabs(name):
        name = os.path.join(out_dir, name)
    return name


def _write_csv(path, header, rows):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    log(f"CLI: wrote {path} ({len(rows)} rows)", LOG_NOTICE)


def _print_csv(header, rows, stream=None):
    writer = csv.writer(stream or sys.stdout, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


def write_manifest(path, command, settings, convention=None):
    """key = value manifest readable with ConfigObj."""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    manifest = ConfigObj(encoding="utf-8")
    manifest.filename = path
    manifest["command"] = command
    for key in sorted(settings):
        value = settings[key]
        if value is None:
            continue
        if isinstance(value, (list, tuple)):
            value = [str(v) for v in value]
        elif isinstance(value, CoefficientConvention):
            value = value.value
        else:
            value = str(value)
        manifest[key] = value
    if convention is not None:
        manifest["convention"] = CoefficientConvention.parse(convention).value
    manifest["version"] = __version__
    manifest["numpy_version"] = np.__version__
    manifest["scipy_version"] = scipy.__version__
    manifest["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    manifest.write()
    log(f"CLI: wrote {path}", LOG_NOTICE)
    return path


# ============================================================================
# Settings
# ============================================================================

def _settings(args, overrides):
    file_values = config.load_file(args.config) if getattr(args, "config", None) else {}
    return config.merge(file_values, overrides)


def _resolved(settings, exp: ExperimentConfig):
    """Settings plus the defaults the run actually used."""
    resolved = dict(settings)
    resolved.setdefault("omega", exp.omega_list[0])
    resolved["method"] = exp.method
    if exp.method == METHOD_MC:
        for key in ("replications", "seed", "chunk_size", "workers"):
            resolved[key] = getattr(exp, key)
    return resolved


def _experiment(settings, default_degrees="JS", default_convention="theorem"):
    merged = dict(settings)
    merged.setdefault("degrees", default_degrees)
    merged.setdefault("convention", default_convention)
    return ExperimentConfig.from_mapping(merged)


def _reports(exp: ExperimentConfig, p, omega, lam, degrees):
    """RiskReports for one (p, omega, lambda) cell, exact or simulated on common draws."""
    ests = [estimators.by_degree(d, p, omega, exp.convention) for d in degrees]
    if exp.method == METHOD_EXACT:
        reports = [exact_risk_general(est, p, lam, DEFAULT_CONTROL) for est in ests]
    else:
        plan = SimulationPlan(p, lam, omega, tuple(ests), exp.replications, exp.seed,
                              chunk_size=exp.chunk_size, workers=exp.workers)
        reports = [mc_report(plan, est, result) for est, result in zip(ests, simulate_risk(plan))]
    return reports


def _risk_rows(exp: ExperimentConfig, p, omega, lam, degrees):
    reports = _reports(exp, p, omega, lam, degrees)
    rows = []
    for degree, report in zip(degrees, reports):
        rows.append([
            str(p), _echo(omega), _echo(lam), _degree_label(degree),
            _convention_label(degree, exp.convention), exp.method,
            _fmt(report.risk), _fmt(report.ratio_to_mle),
            "" if report.stderr is None else _fmt(report.stderr),
        ])
    return rows


def _ratios(exp, p, omega, lam, degrees):
    return [report.ratio_to_mle for report in _reports(exp, p, omega, lam, degrees)]


# ============================================================================
# Commands
# ============================================================================

def cmd_risk(args):
    settings = _settings(args, {
        "p": args.p, "omega": args.omega, "lambda": args.lam, "degrees": args.degree,
        "convention": args.convention, "method": args.method, "replications": args.replications,
        "seed": args.seed, "chunk_size": args.chunk_size, "workers": args.workers, "output": args.output,
    })
    _require(settings, "p", "lambda", "degrees")
    for key, name in (("p", "p"), ("omega", "omega"), ("lambda", "lambda"), ("degrees", "degree")):
        if key in settings:
            settings[key] = _single(settings[key], name)

    exp = _experiment(settings)
    p, omega, lam, degree = exp.p_list[0], exp.omega_list[0], exp.lambda_list[0], exp.degrees[0]

    rows = _risk_rows(exp, p, omega, lam, [degree])
    _print_csv(RISK_COLUMNS, rows)
    base = _output_base(settings, config.output_dir(args.output_dir), "risk")
    if settings.get("output"):
        _write_csv(base + ".csv", RISK_COLUMNS, rows)
    write_manifest(base + ".manifest", "risk", _resolved(settings, exp), exp.convention)
    return EXIT_OK


def cmd_simulate(args):
    settings = _settings(args, {
        "p": args.p, "omega": args.omega, "lambda": args.lam, "degrees": args.degrees,
        "convention": args.convention, "replications": args.replications, "seed": args.seed,
        "chunk_size": args.chunk_size, "workers": args.workers, "output": args.output,
    })
    settings["method"] = METHOD_MC
    _require(settings, "p", "lambda")
    for key in ("p", "omega", "lambda"):
        if key in settings:
            settings[key] = _single(settings[key], key)

    exp = _experiment(settings, default_degrees=["MLE", "JS"])
    p, omega, lam = exp.p_list[0], exp.omega_list[0], exp.lambda_list[0]
    rows = _risk_rows(exp, p, omega, lam, exp.degrees_for(p))
    _print_csv(RISK_COLUMNS, rows)
    base = _output_base(settings, config.output_dir(args.output_dir), "simulate")
    if settings.get("output"):
        _write_csv(base + ".csv", RISK_COLUMNS, rows)
    write_manifest(base + ".manifest", "simulate", _resolved(settings, exp), exp.convention)
    return EXIT_OK


def _map_cells(fn, cells, workers):
    """Evaluate independent grid cells; results come back in grid order."""
    if workers > 1 and len(cells) > 1:
        with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="Grid-Cell") as executor:
            return list(executor.map(fn, cells))
    return [fn(cell) for cell in cells]


def cmd_table(args):
    preset = args.table
    overrides = {
        "p": args.p_list, "omega": args.omega_list, "lambda": args.lambda_list, "degrees": args.degrees,
        "convention": args.convention, "method": args.method, "replications": args.replications,
        "seed": args.seed, "workers": args.workers, "output": args.output, "table": preset,
    }
    settings = _settings(args, overrides)
    preset = settings.get("table")

    if preset is not None:
        tab = reference.table(_single(preset, "table"))
        settings.update({
            "table": tab.number, "p": [tab.p], "omega": list(reference.OMEGAS), "lambda": list(reference.LAMBDAS),
            "degrees": [_degree_label(d) for d in tab.degrees],
        })
        exp = _experiment(settings, default_convention=CoefficientConvention.SIMULATION.value)
        default_name = f"table{tab.number}"
        cells = [(tab.p, lam, omega) for lam in reference.LAMBDAS for omega in reference.OMEGAS]
    else:
        _require(settings, "p", "lambda")
        exp = _experiment(settings)
        default_name = "table"
        cells = [(p, lam, omega) for p in exp.p_list for lam in exp.lambda_list for omega in exp.omega_list]

    settings["convention"] = exp.convention.value
    degrees = exp.degrees
    multi_p = len(exp.p_list) > 1

    def evaluate(cell):
        p, lam, omega = cell
        present = exp.degrees_for(p)
        if not present:
            return cell, []
        return cell, list(zip(present, _risk_rows(exp, p, omega, lam, present)))

    results = _map_cells(evaluate, cells, exp.workers)

    labels = [estimators.family_label(d) for d in degrees]
    wide_header = (["p"] if multi_p else []) + ["lambda", "omega"] + labels
    long_header = ["p", "lambda", "omega", "estimator", "convention", "method", "ratio", "stderr"]
    wide, long_rows = [], []
    for (p, lam, omega), entries in results:
        by_degree = {degree: row for degree, row in entries}
        if not by_degree:
            continue
        wide.append(([str(p)] if multi_p else []) + [_echo(lam), _echo(omega)]
                    + [by_degree[d][7] if d in by_degree else "" for d in degrees])
        for degree in degrees:
            if degree in by_degree:
                row = by_degree[degree]
                long_rows.append([str(p), _echo(lam), _echo(omega), estimators.family_label(degree),
                                  row[4], row[5], row[7], row[8]])

    for skipped in exp.skipped:
        log(f"CLI: {estimators.family_label(skipped.degree)} skipped at p={skipped.p}: {skipped.reason}",
            LOG_WARNING)

    base = _output_base(settings, config.output_dir(args.output_dir), default_name)
    _write_csv(base + ".csv", wide_header, wide)
    _write_csv(base + ".long.csv", long_header, long_rows)
    settings["skipped"] = [f"{estimators.family_label(s.degree)}@p={s.p}" for s in exp.skipped]
    write_manifest(base + ".manifest", "table", settings, exp.convention)
    log(f"CLI: table written to {base}.csv", LOG_INFO)
    return EXIT_OK


def cmd_curve(args):
    settings = _settings(args, {
        "p": args.p, "omega": args.omega, "degrees": args.degrees, "convention": args.convention,
        "lambda_max": args.lambda_max, "steps": args.steps, "figure": args.figure,
        "workers": args.workers, "output": args.output,
    })

    figure = settings.get("figure")
    if figure is not None:
        preset = reference.figure(_single(figure, "figure"))
        settings.update({"figure": preset.number, "p": preset.p, "omega": preset.omega,
                         "degrees": [_degree_label(d) for d in preset.degrees]})
        settings.setdefault("lambda_max", reference.FIGURE_LAMBDA_MAX)
        settings.setdefault("steps", reference.FIGURE_STEPS)
        default_name = f"figure{preset.number}"
    else:
        _require(settings, "p", "degrees", "lambda_max", "steps")
        default_name = "curve"

    p = config.as_int(_single(settings["p"], "p"), "p")
    omega = config.as_float(_single(settings.get("omega", 0.0), "omega"), "omega")
    lambda_max = config.as_float(_single(settings["lambda_max"], "lambda-max"), "lambda-max")
    steps = config.as_int(_single(settings["steps"], "steps"), "steps")
    if not lambda_max > 0 or lambda_max == float("inf"):
        raise UsageError(f"--lambda-max must be finite and > 0, got {lambda_max!r}")
    if steps < 1:
        raise UsageError(f"--steps must be >= 1, got {steps}")

    grid = [lambda_max * i / steps for i in range(steps + 1)]
    settings["p"], settings["omega"] = p, omega
    exp = _experiment(dict(settings, **{"lambda": [0.0]}))
    if exp.skipped:
        raise UsageError("; ".join(f"{s.reason} (got p={p})" for s in exp.skipped))
    degrees = exp.degrees

    ratios = _map_cells(lambda lam: _ratios(exp, p, omega, lam, degrees), grid, exp.workers)
    header = ["lambda"] + [estimators.family_label(d) for d in degrees]
    rows = [[_fmt(lam)] + [_fmt(r) for r in values] for lam, values in zip(grid, ratios)]

    base = _output_base(settings, config.output_dir(args.output_dir), default_name)
    _write_csv(base + ".csv", header, rows)
    settings["convention"] = exp.convention.value
    write_manifest(base + ".manifest", "curve", settings, exp.convention)
    return EXIT_OK


def cmd_verify(args):
    settings = _settings(args, {"quick": args.quick or None, "output": args.output})
    quick = config.as_bool(settings.get("quick", False))
    settings["quick"] = "yes" if quick else "no"

    report = run_verification(quick=quick)
    for line in report.lines():
        print(line)

    header = ["section", "check", "status", "target", "observed", "tolerance", "detail"]
    rows = [[r.section, r.name, r.status, r.target,
             "" if r.observed != r.observed else _fmt(r.observed),
             "" if r.tolerance != r.tolerance else f"{r.tolerance:.3g}", r.detail]
            for r in report.results]
    base = _output_base(settings, config.output_dir(args.output_dir), "verify_report")
    _write_csv(base + ".csv", header, rows)
    settings["adjudication"] = [f"table{n}={scheme}" for n, (scheme, _) in sorted(report.adjudication.items())]
    write_manifest(base + ".manifest", "verify", settings)

    if not report.ok:
        for failure in report.failures:
            print(f"FAILED: {failure.section}: {failure.name}", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    return EXIT_OK


# ============================================================================
# Parser
# ============================================================================

class _Parser(argparse.ArgumentParser):
    """argparse raises UsageError instead of exiting so main() owns the exit code."""

    def error(self, message):
        raise UsageError(message)


def _degree_arg(text):
    try:
        parse_degree(text)
    except ShrinkageError as e:
        raise argparse.ArgumentTypeError(str(e))
    return text.strip().upper()


def build_parser():
    common = _Parser(add_help=False)
    # Suppressed defaults keep a flag given before the subcommand from being reset by it
    common.add_argument("-v", "--verbose", action="count", default=argparse.SUPPRESS, help="More log output (repeatable)")
    common.add_argument("-q", "--quiet", action="count", default=argparse.SUPPRESS, help="Less log output (repeatable)")
    common.add_argument("--config", metavar="PATH", default=argparse.SUPPRESS, help="Flat key = value settings file")
    common.add_argument("--output-dir", metavar="DIR", default=argparse.SUPPRESS,
                        help=f"Directory for output files (default ${config.OUTPUT_DIR_ENV} or .)")

    parser = _Parser(prog="balanced-shrinkage", parents=[common],
                     description="Exact and simulated risks of polynomial shrinkage estimators under balanced loss.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def conv_arg(p, default=None):
        p.add_argument("--convention", type=str.lower, choices=["theorem", "simulation"], default=default,
                       help="Coefficient convention for degrees >= 2")

    def mc_args(p):
        p.add_argument("--replications", type=int, help="Monte Carlo draws")
        p.add_argument("--seed", type=int, help="Monte Carlo seed (64-bit unsigned)")
        p.add_argument("--chunk-size", dest="chunk_size", type=int, help="Draws per chunk")
        p.add_argument("--workers", type=int, help="Worker threads (results do not depend on it)")

    risk = sub.add_parser("risk", parents=[common], help="One risk value")
    risk.add_argument("--p", type=int)
    risk.add_argument("--omega", type=float)
    risk.add_argument("--lambda", dest="lam", type=float)
    risk.add_argument("--degree", type=_degree_arg, help="MLE, JS, 2, 3 or 4")
    conv_arg(risk)
    risk.add_argument("--method", type=str.lower, choices=[METHOD_EXACT, METHOD_MC])
    mc_args(risk)
    risk.add_argument("--output", help="Output name; also writes NAME.csv (default risk, manifest only)")
    risk.set_defaults(handler=cmd_risk)

    table = sub.add_parser("table", parents=[common], help="Risk-ratio table")
    table.add_argument("--table", type=int, help="Published table 1..4")
    table.add_argument("--p-list", dest="p_list", help="Comma-separated dimensions")
    table.add_argument("--omega-list", dest="omega_list", help="Comma-separated loss weights")
    table.add_argument("--lambda-list", dest="lambda_list", help="Comma-separated noncentralities")
    table.add_argument("--degrees", help="Comma-separated families (MLE, JS, 2, 3, 4)")
    conv_arg(table)
    table.add_argument("--method", type=str.lower, choices=[METHOD_EXACT, METHOD_MC])
    mc_args(table)
    table.add_argument("--output", help="Output name (default tableN or table)")
    table.set_defaults(handler=cmd_table)

    curve = sub.add_parser("curve", parents=[common], help="Risk ratios along lambda")
    curve.add_argument("--figure", type=int, help="Published figure preset 1..8")
    curve.add_argument("--p", type=int)
    curve.add_argument("--omega", type=float)
    curve.add_argument("--degrees", help="Comma-separated families (MLE, JS, 2, 3, 4)")
    curve.add_argument("--lambda-max", dest="lambda_max", type=float)
    curve.add_argument("--steps", type=int)
    conv_arg(curve)
    curve.add_argument("--workers", type=int)
    curve.add_argument("--output", help="Output name (default figureN or curve)")
    curve.set_defaults(handler=cmd_curve)

    simulate = sub.add_parser("simulate", parents=[common], help="Monte Carlo risks")
    simulate.add_argument("--p", type=int)
    simulate.add_argument("--omega", type=float)
    simulate.add_argument("--lambda", dest="lam", type=float)
    simulate.add_argument("--degrees", help="Comma-separated families (default MLE,JS)")
    conv_arg(simulate)
    mc_args(simulate)
    simulate.add_argument("--output", help="Output name; also writes NAME.csv (default simulate, manifest only)")
    simulate.set_defaults(handler=cmd_simulate)

    verify = sub.add_parser("verify", parents=[common], help="Run the verification suites")
    verify.add_argument("--quick", action="store_true", help="Reduced grids and replication counts")
    verify.add_argument("--output", help="Report name (default verify_report)")
    verify.set_defaults(handler=cmd_verify)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        for name, default in (("verbose", 0), ("quiet", 0), ("config", None), ("output_dir", None)):
            if not hasattr(args, name):
                setattr(args, name, default)
        configure(LOG_WARNING + args.verbose - args.quiet)
        if not getattr(args, "handler", None):
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        return args.handler(args)
    except ShrinkageError as e:
        print(f"balanced-shrinkage: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"balanced-shrinkage: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
