"""Command-line interface.

Subcommands: ``fit``, ``test``, ``simulate``, ``sample``, ``density-grid``
and ``schema``.  Exit codes are part of the interface: 0 success, 2 input
error, 3 non-convergence, 4 degenerate data.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Optional, Sequence

from . import __version__
from .data import PairedSample
from .datafile import DataFile, read_pairs
from .errors import (
    BootstrapFailureError,
    ConvergenceError,
    DegenerateSampleError,
    DomainError,
    NonPositiveScaleError,
    OptimizerInconsistencyError,
    PseudoLogitError,
    SingularInformationError,
)
from .estimation import FitResult, fit_mle, method_of_moments
from .inference import SubModel, bootstrap, lrt, wald_intervals
from .model import PAPER_PARAMS, ModelParams
from .rng import RandomStream
from .schema import (
    FIT_CSV_COLUMNS,
    GRID_CSV_COLUMNS,
    SAMPLE_CSV_COLUMNS,
    SCHEMA_VERSION,
    SCHEMAS,
    STUDY_CSV_COLUMNS,
)
from .simulation import StudyConfig, StudyReport, density_grid, run_study, sample_arrays

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NONCONVERGENCE = 3
EXIT_DEGENERATE = 4

DEFAULT_MOM_BOOTSTRAP_B = 200

# Flags taking comma lists whose first entry may be negative ("-10,14").
_LIST_FLAGS = ("--params", "--x-range", "--y-range")


class _InputError(Exception):
    pass


# --------------------------------------------------------------------------
# formatting helpers


def _num(v):
    """JSON-safe float: NaN/inf become null."""
    if v is None:
        return None
    v = float(v)
    return v if math.isfinite(v) else None


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else ""
    return str(v)


def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _json_text(doc) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _emit(text: str, out: Optional[str]):
    if out in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _parse_floats(text: str, count: Optional[int], flag: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError:
        raise _InputError(f"{flag}: expected comma-separated numbers, got {text!r}") from None
    if count is not None and len(vals) != count:
        raise _InputError(f"{flag}: expected {count} values, got {len(vals)}")
    if not all(math.isfinite(v) for v in vals):
        raise _InputError(f"{flag}: values must be finite")
    return vals


def _parse_ints(text: str, flag: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise _InputError(f"{flag}: expected comma-separated integers, got {text!r}") from None


def _params_from_args(args) -> ModelParams:
    if getattr(args, "params", None):
        try:
            return ModelParams(*_parse_floats(args.params, 5, "--params"))
        except DomainError as exc:
            raise _InputError(f"--params: {exc}") from None
    return PAPER_PARAMS


def _command_echo(name: str, args, skip=("out", "func", "command")) -> dict:
    opts = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    return {"name": name, "options": opts}


def _fit_block(fit: FitResult, model: str, level: float, se_method: Optional[str],
               boot=None) -> dict:
    names = fit.parameter_names
    values = fit.free_values()
    block = {
        "model": model,
        "method": fit.method.value,
        "converged": bool(fit.converged),
        "iterations": int(fit.iterations),
        "grad_norm": _num(fit.grad_norm),
        "parameter_names": list(names),
        "estimates": {k: _num(v) for k, v in zip(names, values)},
        "model_params": {k: _num(v) for k, v in fit.estimates.as_dict().items()},
        "std_errors": (None if fit.std_errors is None
                       else {k: _num(v) for k, v in zip(names, fit.std_errors)}),
        "std_error_method": se_method if fit.std_errors is not None else None,
        "intervals": {k: {"lower": ci.lower, "upper": ci.upper, "level": ci.level, "method": ci.method}
                      for k, ci in wald_intervals(fit, level).items()},
        "loglik": _num(fit.loglik_at_estimate),
        "minus2loglik": _num(fit.minus2loglik),
        "k": fit.k,
        "n": fit.n,
        "aic": _num(fit.aic),
        "bic": _num(fit.bic),
    }
    if boot is not None:
        block["bootstrap_intervals"] = {
            k: {"lower": ci.lower, "upper": ci.upper, "level": ci.level, "method": ci.method}
            for k, ci in boot.intervals.items()}
        block["bootstrap_failed"] = int(boot.n_failed)
    if fit.note:
        block["note"] = fit.note
    return block


def _fit_rows(block: dict, pc, m2logT=None, p_value=None):
    for name in block["parameter_names"]:
        se = block["std_errors"][name] if block["std_errors"] else None
        ci = block["intervals"].get(name)
        yield (block["model"], name, block["estimates"][name], se,
               ci["lower"] if ci else None, ci["upper"] if ci else None,
               block["minus2loglik"], block["k"], block["aic"], block["bic"], pc, m2logT, p_value)


def _load(args) -> tuple[PairedSample, dict]:
    spec = DataFile(args.data, delimiter=args.delimiter,
                    header={"auto": None, "yes": True, "no": False}[args.header],
                    x_column=args.x_column, y_column=args.y_column)
    sample, digest = read_pairs(spec)
    return sample, {"path": args.data, "sha256": digest, "n": sample.n}


def _pc(sample: PairedSample):
    return None if sample.degenerate else _num(sample.r_xy)


# --------------------------------------------------------------------------
# commands


def cmd_fit(args) -> tuple[str, int]:
    sample, input_info = _load(args)
    warnings: list[str] = []
    boot = None
    se_method = None
    if args.method == "mle":
        fit = fit_mle(sample)
        se_method = "observed-information"
        if fit.std_errors is None:
            warnings.append("observed information is singular; no standard errors")
        estimator = lambda d: fit_mle(d, compute_se=False)  # noqa: E731
        B = args.bootstrap_B or 0
    else:
        variant = "paper" if args.method == "mom-paper" else "corrected"
        fit = method_of_moments(sample, variant)
        estimator = lambda d: method_of_moments(d, variant).estimates  # noqa: E731
        B = DEFAULT_MOM_BOOTSTRAP_B if args.bootstrap_B is None else args.bootstrap_B
    if B:
        try:
            boot = bootstrap(sample, estimator, B, args.seed, args.ci_level,
                             parameter_names=fit.parameter_names)
            fit.std_errors = boot.se
            se_method = "bootstrap"
        except BootstrapFailureError as exc:
            warnings.append(f"bootstrap unavailable: {exc}")
    block = _fit_block(fit, "full", args.ci_level, se_method, boot)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": _command_echo("fit", args),
        "input": input_info,
        "fit": block,
        "pearson_correlation": _pc(sample),
        "warnings": warnings,
    }
    code = EXIT_OK if fit.converged else EXIT_NONCONVERGENCE
    if args.format == "csv":
        return _csv_text(FIT_CSV_COLUMNS, _fit_rows(block, doc["pearson_correlation"])), code
    return _json_text(doc), code


def cmd_test(args) -> tuple[str, int]:
    sample, input_info = _load(args)
    res = lrt(sample, SubModel(args.submodel))
    full = _fit_block(res.unrestricted, "full", args.ci_level, "observed-information")
    restricted = _fit_block(res.restricted, res.submodel.value, args.ci_level, "observed-information")
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": _command_echo("test", args),
        "input": input_info,
        "full": full,
        "restricted": restricted,
        "test": {
            "submodel": res.submodel.value,
            "statistic_T": res.statistic_T,
            "log_T": res.log_T,
            "minus2logT": res.minus2logT,
            "df": res.df,
            "p_value": res.p_value,
            "converged": res.converged,
        },
        "pearson_correlation": _pc(sample),
        "warnings": [],
    }
    code = EXIT_OK if res.converged else EXIT_NONCONVERGENCE
    if args.format == "csv":
        pc = doc["pearson_correlation"]
        rows = list(_fit_rows(full, pc)) + list(_fit_rows(restricted, pc, res.minus2logT, res.p_value))
        return _csv_text(FIT_CSV_COLUMNS, rows), code
    return _json_text(doc), code


def _summary_dict(s):
    if s is None:
        return None
    return {"mean": _num(s.mean), "se": _num(s.se), "bias": _num(s.bias),
            "ci_lower": _num(s.ci_lower), "ci_upper": _num(s.ci_upper), "n_used": s.n_used}


def study_to_dict(report: StudyReport, command: Optional[dict] = None) -> dict:
    cfg = report.config
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command or {"name": "simulate", "options": {}},
        "config": {
            "true_params": cfg.true_params.as_dict(),
            "sample_sizes": list(cfg.sample_sizes),
            "replicates": cfg.replicates,
            "submodel": None if cfg.submodel is None else cfg.submodel.value,
            "bootstrap_B": cfg.bootstrap_B,
            "ci_level": cfg.ci_level,
            "seed": int(cfg.seed),
            "mom_variant": cfg.mom_variant,
        },
        "blocks": [
            {
                "n": b.n,
                "replicates": b.replicates,
                "n_failed": b.n_failed,
                "failure_rate": b.failure_rate,
                "pc_mean": _num(b.pc_mean),
                "minus2loglik_mean": _num(b.minus2loglik_mean),
                "restricted_minus2loglik_mean": _num(b.restricted_minus2loglik_mean),
                "rows": [
                    {
                        "model": r.model,
                        "parameter": r.parameter,
                        "true_value": r.true_value,
                        "mle": _summary_dict(r.mle),
                        "mom_paper": _summary_dict(r.mom_paper),
                        "mom_corrected": _summary_dict(r.mom_corrected),
                        "boot_se_mle": _num(r.boot_se_mle),
                    }
                    for r in b.rows
                ],
            }
            for b in report.blocks
        ],
    }


def study_csv_rows(report: StudyReport):
    variant = report.config.mom_variant
    for b in report.blocks:
        for r in b.rows:
            mom = r.mom_paper if variant == "paper" else r.mom_corrected
            m2ll = b.minus2loglik_mean if r.model == "full" else b.restricted_minus2loglik_mean
            yield (
                r.model, b.n, r.parameter, r.true_value,
                r.mle.mean, r.mle.se, r.mle.bias, r.mle.ci_lower, r.mle.ci_upper,
                variant if mom is not None else None,
                *((mom.mean, mom.se, mom.bias, mom.ci_lower, mom.ci_upper) if mom else (None,) * 5),
                r.boot_se_mle, b.pc_mean, m2ll, r.mle.n_used, b.failure_rate,
            )


def cmd_simulate(args) -> tuple[str, int]:
    try:
        cfg = StudyConfig(
            true_params=_params_from_args(args),
            sample_sizes=_parse_ints(args.n, "--n"),
            replicates=args.replicates,
            submodel=args.submodel,
            bootstrap_B=args.bootstrap_B or 0,
            ci_level=args.ci_level,
            seed=args.seed,
            mom_variant=args.mom_variant,
        )
    except DomainError as exc:
        raise _InputError(str(exc)) from None
    report = run_study(cfg)
    if args.format == "json":
        return _json_text(study_to_dict(report, _command_echo("simulate", args))), EXIT_OK
    return _csv_text(STUDY_CSV_COLUMNS, study_csv_rows(report)), EXIT_OK


def cmd_sample(args) -> tuple[str, int]:
    p = _params_from_args(args)
    if args.n < 0:
        raise _InputError("--n must be >= 0")
    xs, ys = sample_arrays(p, args.n, RandomStream(args.seed))
    return _csv_text(SAMPLE_CSV_COLUMNS, zip(xs.tolist(), ys.tolist())), EXIT_OK


def cmd_density_grid(args) -> tuple[str, int]:
    p = _params_from_args(args)
    m = p.mu
    my = p.alpha + p.beta * p.mu
    sy = math.sqrt(p.sigma1 ** 2 + (p.beta * p.sigma0) ** 2)
    x_range = _parse_floats(args.x_range, 2, "--x-range") if args.x_range else [m - 8 * p.sigma0, m + 8 * p.sigma0]
    y_range = _parse_floats(args.y_range, 2, "--y-range") if args.y_range else [my - 8 * sy, my + 8 * sy]
    try:
        grid = density_grid(p, tuple(x_range), tuple(y_range), args.resolution)
    except DomainError as exc:
        raise _InputError(str(exc)) from None
    return _csv_text(GRID_CSV_COLUMNS, grid.rows()), EXIT_OK


def cmd_schema(args) -> tuple[str, int]:
    return _json_text(SCHEMAS[args.report]), EXIT_OK


# --------------------------------------------------------------------------
# argument parsing


def _add_data_args(p):
    p.add_argument("--data", required=True, help="delimited text file with x and y columns")
    p.add_argument("--delimiter", default=",", help="field delimiter (default: comma)")
    p.add_argument("--header", choices=("auto", "yes", "no"), default="auto",
                   help="whether the first row is a header (default: auto-detect)")
    p.add_argument("--x-column", default="1", help="1-based index or header name of x (default 1)")
    p.add_argument("--y-column", default="2", help="1-based index or header name of y (default 2)")


def _add_param_args(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--params", metavar="MU,SIGMA0,ALPHA,BETA,SIGMA1",
                   help="model parameters")
    g.add_argument("--preset", choices=("paper",), help="named parameter preset (paper = 2,3,1,3,2)")


def _add_output_args(p, formats=("json", "csv"), default="json"):
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.add_argument("--format", choices=formats, default=default)


def _level(text: str) -> float:
    v = float(text)
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError("must lie in (0, 1)")
    return v


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("must be a 64-bit unsigned integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pseudologit",
                                     description="Bivariate pseudo-logistic distribution toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="estimate the full model from data")
    _add_data_args(p)
    p.add_argument("--method", choices=("mle", "mom-corrected", "mom-paper"), default="mle")
    p.add_argument("--bootstrap-B", type=int, default=None,
                   help=f"bootstrap resamples (default: {DEFAULT_MOM_BOOTSTRAP_B} for moment fits, 0 for mle)")
    p.add_argument("--ci-level", type=_level, default=0.95)
    p.add_argument("--seed", type=_seed, default=0)
    _add_output_args(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("test", help="likelihood-ratio test of a sub-model")
    _add_data_args(p)
    p.add_argument("--submodel", required=True, choices=[m.value for m in SubModel])
    p.add_argument("--ci-level", type=_level, default=0.95)
    _add_output_args(p)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("simulate", help="Monte Carlo study of the estimators")
    _add_param_args(p)
    p.add_argument("--n", default="30,50,100,200,500", help="comma-separated sample sizes")
    p.add_argument("--replicates", type=int, default=500)
    p.add_argument("--bootstrap-B", type=int, default=0)
    p.add_argument("--ci-level", type=_level, default=0.95)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--submodel", choices=[m.value for m in SubModel], default=None)
    p.add_argument("--mom-variant", choices=("corrected", "paper"), default="corrected")
    _add_output_args(p, default="csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sample", help="draw pairs from the model as CSV")
    _add_param_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("density-grid", help="joint density on a lattice as CSV")
    _add_param_args(p)
    p.add_argument("--x-range", metavar="LO,HI")
    p.add_argument("--y-range", metavar="LO,HI")
    p.add_argument("--resolution", type=int, default=100)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_density_grid)

    p = sub.add_parser("schema", help="print the JSON schema of a report")
    p.add_argument("report", choices=sorted(SCHEMAS))
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_schema)
    return parser


def _glue_list_flags(argv: Sequence[str]) -> list[str]:
    """Attach values like ``-10,14`` to their flag so argparse does not read an option."""
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in _LIST_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = _glue_list_flags(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text, code = args.func(args)
    except _InputError as exc:
        print(f"pseudologit: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DegenerateSampleError, NonPositiveScaleError, SingularInformationError) as exc:
        print(f"pseudologit: degenerate data: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (ConvergenceError, OptimizerInconsistencyError, BootstrapFailureError) as exc:
        print(f"pseudologit: did not converge: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (DomainError, PseudoLogitError) as exc:
        print(f"pseudologit: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        _emit(text, args.out)
    except OSError as exc:
        print(f"pseudologit: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if code == EXIT_NONCONVERGENCE:
        print("pseudologit: fit did not converge; report written with converged=false",
              file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
