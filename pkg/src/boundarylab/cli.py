"""Command-line interface: study runners, individual rules, and the
data validator.

Flag precedence is flags > config file (simple ``key=value`` lines) >
environment (``BOUNDARYLAB_OUT`` for the output directory) > built-in
defaults.  Exit status: 0 success (including a skipped study 5), 1 usage
error, 2 data-validation failure.
"""

import argparse
import os
import sys
from pathlib import Path

from .bernoulli import (BernoulliCounts, BetaPosterior, BoundaryRuleConfig,
                        JEFFREYS, all_failure_threshold,
                        binomial_onesided_pvalue, clopper_pearson_upper_zero,
                        exact_stop_prob_tau0, posterior_update,
                        prob_all_failures, rm_window_path)
from .errors import BoundaryLabError, DataValidationError
from .randhie import validate_data
from .sprt import SprtConfig, all_failure_stop_time
from .studies import StudyConfig, run_and_emit

_STUDY_COMMANDS = ("study1", "study2", "study3", "study4", "study5")


def _parse_grid(text, cast):
    if text is None:
        return ()
    try:
        return tuple(cast(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid value in {text!r}")


def _read_config_file(path) -> dict:
    values = {}
    for line_no, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise BoundaryLabError(
                f"config line {line_no} is not key=value: {line!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boundarylab",
        description="Boundary-degeneracy rules and study reproduction")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--reps", type=int, default=None)
    common.add_argument("--out", type=str, default=None)
    common.add_argument("--threads", type=int, default=None)
    common.add_argument("--config", type=str, default=None)
    common.add_argument("--paper-scale", action="store_true", default=None)
    common.add_argument("--data", type=str, default=None,
                        help="RAND HIE CSV (study 5 only)")
    common.add_argument("--p-grid", type=str, default=None)
    common.add_argument("--rho-grid", type=str, default=None)
    common.add_argument("--eps-grid", type=str, default=None)
    common.add_argument("--n-grid", type=str, default=None)
    common.add_argument("--d-grid", type=str, default=None)

    for name in _STUDY_COMMANDS:
        sub.add_parser(name, parents=[common],
                       help=f"run {name} and write its CSV outputs")
    sub.add_parser("all", parents=[common],
                   help="run every study (study 5 only when --data is given)")

    rule = sub.add_parser("rule", help="evaluate a single closed-form rule")
    rule.add_argument("name", choices=[
        "all-failure-threshold", "prob-all-failures", "exact-stop-prob",
        "clopper-pearson-upper", "binomial-pvalue", "sprt-stop-time",
        "posterior-mean", "rm-window"])
    rule.add_argument("--epsilon", type=float)
    rule.add_argument("--alpha", type=float, default=0.05)
    rule.add_argument("--beta", type=float, default=0.05)
    rule.add_argument("--p", type=float)
    rule.add_argument("--p0", type=float)
    rule.add_argument("--p1", type=float)
    rule.add_argument("--n", type=int)
    rule.add_argument("--s", type=int)
    rule.add_argument("--n-max", type=int, default=1000)
    rule.add_argument("--k-max", type=int, default=19)
    rule.add_argument("--prior-a", type=float, default=JEFFREYS.a)
    rule.add_argument("--prior-b", type=float, default=JEFFREYS.b)

    validate = sub.add_parser("validate-data",
                              help="validate a RAND HIE CSV file")
    validate.add_argument("--data", type=str, required=True)
    return parser


def _require(args, names):
    missing = [n for n in names if getattr(args, n.replace("-", "_")) is None]
    if missing:
        raise BoundaryLabError(
            f"rule requires {', '.join('--' + n for n in missing)}")


def _run_rule(args) -> int:
    if args.name == "all-failure-threshold":
        _require(args, ["epsilon"])
        print(all_failure_threshold(
            BoundaryRuleConfig(args.epsilon, args.alpha)))
    elif args.name == "prob-all-failures":
        _require(args, ["p", "n"])
        print(prob_all_failures(args.p, args.n))
    elif args.name == "exact-stop-prob":
        _require(args, ["p", "epsilon"])
        print(exact_stop_prob_tau0(
            args.p, BoundaryRuleConfig(args.epsilon, args.alpha), args.n_max))
    elif args.name == "clopper-pearson-upper":
        _require(args, ["n"])
        print(clopper_pearson_upper_zero(args.n, args.alpha))
    elif args.name == "binomial-pvalue":
        _require(args, ["n", "s", "epsilon"])
        print(binomial_onesided_pvalue(
            BernoulliCounts(args.n, args.s), args.epsilon))
    elif args.name == "sprt-stop-time":
        _require(args, ["p0", "p1"])
        print(all_failure_stop_time(
            SprtConfig(args.p0, args.p1, args.alpha, args.beta)))
    elif args.name == "posterior-mean":
        _require(args, ["n", "s"])
        posterior = posterior_update(BetaPosterior(args.prior_a, args.prior_b),
                                     BernoulliCounts(args.n, args.s))
        print(posterior.mean)
    elif args.name == "rm-window":
        path = rm_window_path(BetaPosterior(args.prior_a, args.prior_b),
                              args.k_max)
        print(",".join(f"{value:.6f}" for value in path))
    return 0


def _merge_options(args) -> dict:
    config = _read_config_file(args.config) if args.config else {}

    def pick(flag, key, cast, default):
        if flag is not None:
            return flag
        if key in config:
            raw = config[key]
            if cast is bool:
                return raw.lower() in ("1", "true", "yes")
            return cast(raw)
        return default

    out_default = os.environ.get("BOUNDARYLAB_OUT", "out")
    return {
        "seed": pick(args.seed, "seed", int, 20260810),
        "reps": pick(args.reps, "reps", int, None),
        "out": Path(pick(args.out, "out", str, out_default)),
        "threads": pick(args.threads, "threads", int, os.cpu_count() or 1),
        "paper_scale": bool(pick(args.paper_scale, "paper_scale", bool,
                                 False)),
        "data": pick(args.data, "data", str, None),
        "p_grid": _parse_grid(args.p_grid, float),
        "rho_grid": _parse_grid(args.rho_grid, float),
        "eps_grid": _parse_grid(args.eps_grid, float),
        "n_grid": _parse_grid(args.n_grid, int),
        "d_grid": _parse_grid(args.d_grid, int),
    }


def _run_studies(study_ids, options) -> int:
    for study_id in study_ids:
        if study_id == 5 and options["data"] is None:
            print("study5 skipped: no --data supplied (supply the RAND HIE "
                  "CSV to run it)", file=sys.stderr)
            continue
        cfg = StudyConfig(
            study_id=study_id,
            replicates=options["reps"],
            seed=options["seed"],
            output_dir=options["out"],
            data_path=options["data"],
            paper_scale=options["paper_scale"],
            p_grid=options["p_grid"],
            rho_grid=options["rho_grid"],
            eps_grid=options["eps_grid"],
            n_grid=options["n_grid"],
            d_grid=options["d_grid"],
        )
        result = run_and_emit(cfg, threads=options["threads"])
        rows = result.get("rows") or result.get("cells")
        print(f"study{study_id}: wrote table{study_id}.csv "
              f"({len(rows)} rows) to {options['out']}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        if args.command == "rule":
            return _run_rule(args)
        if args.command == "validate-data":
            summary = validate_data(args.data)
            print(f"ok: {summary['rows']} rows, {summary['events']} events, "
                  f"prevalence {100 * summary['prevalence']:.2f}%")
            return 0
        options = _merge_options(args)
        if args.command == "all":
            return _run_studies((1, 2, 3, 4, 5), options)
        return _run_studies((int(args.command[-1]),), options)
    except DataValidationError as exc:
        print(f"data validation failed: {exc}", file=sys.stderr)
        return 2
    except BoundaryLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main_entry() -> None:
    sys.exit(main(sys.argv[1:]))
