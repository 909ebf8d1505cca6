"""Command-line interface.

Subcommands::

    likrank rank <csv>                 per-feature scores, best rank first
    likrank select <csv> --method {threshold,changepoint,blockcv}
    likrank classify <train> <test> --model-size R
    likrank simulate --config <file> --out <csv>
    likrank experiment {stability,tables,section53} --reps R --out <dir>

Global flags: --seed, --threads, --standardize.  Exit codes: 0 success,
1 data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from . import __version__
from .adaptive_select import (
    BlockCvSettings,
    ChangePointSettings,
    ThresholdSettings,
    scrambled_score_table,
    select_block_cv,
    select_changepoint,
    select_threshold,
)
from .classify_eval import test_error, train_centroid
from .data_model import DataError, standardize, validate
from .experiments import (
    run_correlation_experiment,
    run_section53_study,
    run_stability_experiment,
)
from .io_csv import load_csv, load_sim_config, save_csv
from .logit_rank import rank
from .simulate import generate

__all__ = ["cli_main", "main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="likrank",
        description="Likelihood-based marginal feature ranking and "
                    "adaptive model-size selection for two-class data.",
    )
    parser.add_argument("--version", action="version", version=f"likrank {__version__}")
    parser.add_argument("--seed", type=int, default=0, help="base RNG seed")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads for replicate-level parallelism")
    parser.add_argument("--standardize", action="store_true",
                        help="standardize feature columns before fitting")
    sub = parser.add_subparsers(dest="command", required=True)

    p_rank = sub.add_parser("rank", help="rank features of a labeled CSV")
    p_rank.add_argument("csv")
    p_rank.add_argument("--has-header", action="store_true")
    p_rank.add_argument("--out", default=None, help="output CSV (default stdout)")

    p_sel = sub.add_parser("select", help="choose a model size from the ranking")
    p_sel.add_argument("csv")
    p_sel.add_argument("--has-header", action="store_true")
    p_sel.add_argument("--method", required=True,
                       choices=["threshold", "changepoint", "blockcv"])
    p_sel.add_argument("--alpha-level", type=float, default=0.2)
    p_sel.add_argument("--n-scrambles", type=int, default=1)
    p_sel.add_argument("--k0", type=int, default=0)
    p_sel.add_argument("--q", type=int, default=None)
    p_sel.add_argument("--block-size", type=int, default=None)
    p_sel.add_argument("--folds", type=int, default=5)
    p_sel.add_argument("--out", default=None,
                       help="write selected feature indices to this CSV")

    p_cls = sub.add_parser("classify", help="centroid classifier on top-R features")
    p_cls.add_argument("train")
    p_cls.add_argument("test")
    p_cls.add_argument("--has-header", action="store_true")
    p_cls.add_argument("--model-size", type=int, required=True)

    p_sim = sub.add_parser("simulate", help="draw a synthetic dataset")
    p_sim.add_argument("--config", required=True, help="key=value config file")
    p_sim.add_argument("--out", required=True, help="output dataset CSV")
    p_sim.add_argument("--truth-out", default=None,
                       help="optional CSV of per-feature mean shifts")

    p_exp = sub.add_parser("experiment", help="run a full study")
    p_exp.add_argument("which", choices=["stability", "tables", "section53"])
    p_exp.add_argument("--reps", type=int, default=200)
    p_exp.add_argument("--out", required=True, help="output directory")

    return parser


def _emit_scores(ranking, out):
    header = ["feature_index", "rank", "ell_hat", "alpha_hat", "beta_hat", "s_hat"]
    rows = [
        [s.feature_index, i + 1, f"{s.ell_hat:.17g}", f"{s.alpha_hat:.17g}",
         f"{s.beta_hat:.17g}", f"{s.s_hat:.17g}"]
        for i, s in enumerate(ranking.scores)
    ]
    if out is None:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    else:
        with open(out, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)


def _load(path, has_header, do_standardize):
    matrix = validate(load_csv(path, has_header=has_header))
    return standardize(matrix) if do_standardize else matrix


def _cmd_rank(args) -> int:
    matrix = _load(args.csv, args.has_header, args.standardize)
    ranking = rank(matrix)
    _emit_scores(ranking, args.out)
    return 0


def _cmd_select(args) -> int:
    matrix = _load(args.csv, args.has_header, args.standardize)
    ranking = rank(matrix)
    if args.method == "threshold":
        scr = scrambled_score_table(matrix, args.n_scrambles, args.seed)
        t = float(np.quantile(scr.ravel(), args.alpha_level))
        result = select_threshold(
            ranking, matrix, t,
            ThresholdSettings(k0=args.k0, q=args.q, mode="scrambled_percentile",
                              alpha_level=args.alpha_level,
                              n_scrambles=args.n_scrambles),
        )
        print(f"method=threshold t={t:.17g} r={result.r}")
    elif args.method == "changepoint":
        scr = scrambled_score_table(matrix, args.n_scrambles, args.seed)
        null_scores = np.sort(scr, axis=1).mean(axis=0)
        result = select_changepoint(
            ranking, null_scores, ChangePointSettings(n_scrambles=args.n_scrambles)
        )
        print(f"method=changepoint k_star={result.diagnostics['k_star']} r={result.r}")
    else:
        result = select_block_cv(
            ranking, matrix,
            BlockCvSettings(block_size=args.block_size, cv_folds=args.folds),
            seed=args.seed,
        )
        print(f"method=blockcv block_size={result.diagnostics['block_size']} "
              f"cv_error={result.diagnostics['cv_error']:.6f} r={result.r}")
    if args.out is not None:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["rank", "feature_index"])
            for i, j in enumerate(result.selected, start=1):
                w.writerow([i, int(j)])
    return 0


def _cmd_classify(args) -> int:
    train = _load(args.train, args.has_header, args.standardize)
    test = _load(args.test, args.has_header, args.standardize)
    if not 1 <= args.model_size <= train.p:
        raise DataError(f"--model-size must be in [1, {train.p}]")
    ranking = rank(train)
    model = train_centroid(train, ranking.order[: args.model_size])
    err = test_error(model, test)
    print(f"model_size={args.model_size} test_error={err:.6f} "
          f"test_rows={test.n}")
    return 0


def _cmd_simulate(args) -> int:
    config = load_sim_config(args.config)
    matrix, truth = generate(config)
    save_csv(matrix, args.out)
    if args.truth_out is not None:
        with open(args.truth_out, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["feature_index", "mu"])
            for j, mu in enumerate(truth):
                w.writerow([j, f"{mu:.17g}"])
    print(f"wrote {matrix.n} rows x {matrix.p} features to {args.out}")
    return 0


def _cmd_experiment(args) -> int:
    if args.which == "stability":
        reports = [run_stability_experiment(args.reps, args.seed, args.threads)]
    elif args.which == "tables":
        reports = [
            run_correlation_experiment(args.reps, "grouped_head", args.seed,
                                       args.threads),
            run_correlation_experiment(args.reps, "randomized", args.seed,
                                       args.threads),
        ]
    else:
        reports = [run_section53_study(args.reps, args.seed, args.threads)]
    for report in reports:
        for path in report.write(args.out):
            print(f"wrote {path}")
    return 0


_COMMANDS = {
    "rank": _cmd_rank,
    "select": _cmd_select,
    "classify": _cmd_classify,
    "simulate": _cmd_simulate,
    "experiment": _cmd_experiment,
}


def cli_main(argv=None) -> int:
    """Entry point; returns the process exit code instead of raising."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())
