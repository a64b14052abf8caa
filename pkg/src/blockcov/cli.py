"""Command-line interface.

Subcommands: ``estimate`` (fit on a CSV data matrix), ``simulate``
(generate a synthetic scenario), ``trace`` (export selection curves for
plotting), and ``benchmark`` (replicated method comparison).

Exit codes: 0 success, 1 argument/IO problems, 2 numerical failure (the
message names the failing pipeline step). The environment variable
BLOCKCOV_SEED is used as the seed when --seed is not given.
"""

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .benchmark import METHODS, BenchmarkConfig, run_benchmark, write_results
from .corr import build_gamma, sample_correlation, vech
from .io import read_matrix_csv, write_matrix_csv
from .lowrank import scree, select_rank_cattell, select_rank_pa, truncate_rank
from .permute import DISSIMILARITY_KINDS
from .pipeline import PipelineConfig, PipelineError, estimate
from .psd import ConvergenceError, PsdConfig
from .simulate import SCENARIOS, ScenarioSpec, build_scenario, permute_columns, sample_gaussian
from .sparsify import candidate_lambdas, select_lambda_elbow

SEED_ENV_VAR = "BLOCKCOV_SEED"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; this tool reserves 2 for
    # numerical failures, so remap argument problems to exit 1.
    def error(self, message):
        raise _UsageError(message)


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except PipelineError as exc:
        print(f"numerical failure in step '{exc.step}': {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


def _build_parser():
    parser = _Parser(prog="blockcov",
                     description="Block-structured sparse correlation estimation.")
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", parents=[_common_seed()],
                         help="estimate a correlation matrix from a CSV data matrix")
    est.add_argument("--input", required=True, help="CSV with one sample per row")
    est.add_argument("--header", action="store_true",
                     help="first input row holds variable names")
    est.add_argument("--rank", default="cattell",
                     help="rank selection: 'cattell', 'pa', or a fixed integer")
    est.add_argument("--lambda", dest="lam", default="elbow",
                     help="threshold selection: 'elbow', 'bl', or a fixed value")
    est.add_argument("--reorder", action="store_true",
                     help="cluster variables first and estimate in leaf order")
    est.add_argument("--dissimilarity", default="one_minus_abs_corr",
                     choices=DISSIMILARITY_KINDS)
    psd_defaults = PsdConfig()
    est.add_argument("--inv-sqrt-threshold", type=float, default=0.1,
                     help="eigenvalues at most this are dropped from the inverse square root")
    est.add_argument("--psd-tol", type=float, default=psd_defaults.tol)
    est.add_argument("--psd-max-iter", type=int, default=psd_defaults.max_iter)
    est.add_argument("--out-sigma", help="write the estimated matrix here (CSV)")
    est.add_argument("--out-invsqrt", help="write the inverse square root here (CSV)")
    est.add_argument("--out-order", help="write the clustering leaf order used by "
                                         "--reorder here (single-column CSV)")
    est.add_argument("--out-report", help="write a JSON report (rank, lambda, support size, "
                                          "eigenvalue extremes, timings)")
    est.set_defaults(func=_cmd_estimate)

    sim = sub.add_parser("simulate", parents=[_common_seed()],
                         help="generate a synthetic scenario")
    sim.add_argument("--scenario", required=True, help=f"one of {', '.join(SCENARIOS)}")
    sim.add_argument("--q", type=int, required=True, help="number of variables (>= 10)")
    sim.add_argument("--n", type=int, required=True, help="number of samples")
    sim.add_argument("--permute-columns", action="store_true",
                     help="randomly permute the columns; writes perm.csv next to --out-x")
    sim.add_argument("--out-x", help="write the data matrix here (CSV)")
    sim.add_argument("--out-sigma", help="write the true correlation matrix here (CSV)")
    sim.add_argument("--out-support", help="write the 0/1 support mask here (CSV)")
    sim.add_argument("--out-z", help="write the loading matrix here (CSV)")
    sim.set_defaults(func=_cmd_simulate)

    tra = sub.add_parser("trace", parents=[_common_seed()],
                         help="export selection diagnostics for plotting")
    tra.add_argument("--input", required=True, help="CSV with one sample per row")
    tra.add_argument("--header", action="store_true")
    tra.add_argument("--rank", default="cattell",
                     help="rank used for the threshold curve: 'cattell', 'pa', or an integer")
    tra.add_argument("--out-scree",
                     help="scree curve CSV: index,value[,pa_quantile with --rank pa]")
    tra.add_argument("--out-elbow",
                     help="threshold curve CSV: lambda,criterion,support_size")
    tra.set_defaults(func=_cmd_trace)

    ben = sub.add_parser("benchmark", parents=[_common_seed()],
                         help="replicated comparison on synthetic scenarios")
    ben.add_argument("--scenarios", default=",".join(SCENARIOS),
                     help="comma-separated scenario names")
    ben.add_argument("--n-list", default="30", help="comma-separated sample counts")
    ben.add_argument("--q-list", default="100", help="comma-separated variable counts")
    ben.add_argument("--reps", type=int, default=1, help="replications per cell")
    ben.add_argument("--methods", default=",".join(METHODS),
                     help=f"comma-separated subset of {', '.join(METHODS)}")
    ben.add_argument("--permute-columns", action="store_true",
                     help="scramble the columns of every generated data matrix")
    ben.add_argument("--reorder", action="store_true",
                     help="let the pipeline methods recover the ordering by clustering")
    ben.add_argument("--inv-sqrt-threshold", type=float, default=0.1)
    ben.add_argument("--jobs", type=int, default=1, help="parallel worker count")
    ben.add_argument("--out", required=True, help="results CSV path")
    ben.set_defaults(func=_cmd_benchmark)
    return parser


def _common_seed():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=None,
                   help=f"random seed (default: ${SEED_ENV_VAR} or 0)")
    return p


def _resolve_seed(args):
    if args.seed is not None:
        seed = args.seed
    else:
        seed = int(os.environ.get(SEED_ENV_VAR, "0"))
    if seed < 0:
        raise _UsageError(f"seed must be non-negative, got {seed}")
    return seed


def _parse_rank(value):
    if value in ("cattell", "pa"):
        return value
    try:
        r = int(value)
    except ValueError:
        raise _UsageError(f"--rank must be 'cattell', 'pa' or a positive integer, got {value!r}")
    if r < 1:
        raise _UsageError(f"--rank must be at least 1, got {r}")
    return r


def _parse_lambda(value):
    if value in ("elbow", "bl"):
        return value
    try:
        lam = float(value)
    except ValueError:
        raise _UsageError(f"--lambda must be 'elbow', 'bl' or a non-negative value, got {value!r}")
    if lam < 0:
        raise _UsageError(f"--lambda must be non-negative, got {lam}")
    return lam


def _cmd_estimate(args):
    X, names = read_matrix_csv(args.input, header=args.header)
    cfg = PipelineConfig(
        rank_method=_parse_rank(args.rank),
        lambda_method=_parse_lambda(args.lam),
        reorder=args.reorder,
        dissimilarity_kind=args.dissimilarity,
        psd=PsdConfig(tol=args.psd_tol, max_iter=args.psd_max_iter),
        inv_sqrt_threshold=args.inv_sqrt_threshold,
        seed=_resolve_seed(args),
    )
    est = estimate(X, cfg)
    if args.out_sigma:
        write_matrix_csv(args.out_sigma, est.sigma_hat, names=names)
    if args.out_invsqrt:
        write_matrix_csv(args.out_invsqrt, est.inv_sqrt.matrix, names=names)
    if args.out_order:
        write_matrix_csv(args.out_order, est.permutation)
    if args.out_report:
        eigvals = np.linalg.eigvalsh(est.sigma_hat)
        report = {
            "schema": "blockcov-report v1",
            "n": int(X.shape[0]),
            "q": int(X.shape[1]),
            "rank": est.rank.r,
            "rank_method": est.rank.method,
            "lambda": est.lam.lam,
            "lambda_method": est.lam.method,
            "support_size": est.lam.support_size,
            "eigenvalue_min": float(eigvals[0]),
            "eigenvalue_max": float(eigvals[-1]),
            "inv_sqrt_kept": est.inv_sqrt.kept,
            "inv_sqrt_dropped": est.inv_sqrt.dropped,
            "reordered": bool(args.reorder),
            "timings_s": {k: round(v, 6) for k, v in est.timings.items()},
        }
        with open(args.out_report, "w") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
    return 0


def _cmd_simulate(args):
    if args.scenario not in SCENARIOS:
        raise _UsageError(f"unknown scenario {args.scenario!r}; valid names: {', '.join(SCENARIOS)}")
    seed = _resolve_seed(args)
    truth = build_scenario(ScenarioSpec(args.scenario, args.q, seed=seed))
    X = sample_gaussian(truth, args.n, seed=seed)
    if args.permute_columns:
        X, perm = permute_columns(X, seed=seed)
        if args.out_x:
            write_matrix_csv(Path(args.out_x).parent / "perm.csv", perm)
    if args.out_x:
        write_matrix_csv(args.out_x, X)
    if args.out_sigma:
        write_matrix_csv(args.out_sigma, truth.Sigma)
    if args.out_support:
        write_matrix_csv(args.out_support, truth.support.astype(int))
    if args.out_z:
        write_matrix_csv(args.out_z, truth.Z)
    return 0


def _cmd_trace(args):
    X, _ = read_matrix_csv(args.input, header=args.header)
    seed = _resolve_seed(args)
    rank_method = _parse_rank(args.rank)
    R = sample_correlation(X)
    G = build_gamma(R)
    s = scree(G)
    pa_quantile = None
    if isinstance(rank_method, int):
        r = rank_method
    elif rank_method == "pa":
        sel = select_rank_pa(X, seed=seed)
        r = sel.r
        pa_quantile = sel.trace["quantile_curve"]
    else:
        n, q = X.shape
        sel = select_rank_cattell(s, r_max=max(2, min(n - 1, q - 2, 50)))
        r = sel.r
    if args.out_scree:
        idx = np.arange(1, s.size + 1)
        if pa_quantile is None:
            write_matrix_csv(args.out_scree, np.column_stack([idx, s]),
                             names=["index", "value"])
        else:
            write_matrix_csv(args.out_scree, np.column_stack([idx, s, pa_quantile]),
                             names=["index", "value", "pa_quantile"])
    if args.out_elbow:
        G_r = truncate_rank(G, r)
        grid = candidate_lambdas(vech(G_r))
        sel = select_lambda_elbow(R, G_r, grid)
        write_matrix_csv(args.out_elbow,
                         np.column_stack([sel.trace["grid"], sel.trace["criterion"],
                                          sel.trace["support_size"]]),
                         names=["lambda", "criterion", "support_size"])
    return 0


def _cmd_benchmark(args):
    scenarios = tuple(s.strip() for s in args.scenarios.split(",") if s.strip())
    for s in scenarios:
        if s not in SCENARIOS:
            raise _UsageError(f"unknown scenario {s!r}; valid names: {', '.join(SCENARIOS)}")
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    for m in methods:
        if m not in METHODS:
            raise _UsageError(f"unknown method {m!r}; valid names: {', '.join(METHODS)}")
    if args.reps < 1:
        raise _UsageError(f"--reps must be at least 1, got {args.reps}")
    if args.jobs < 1:
        raise _UsageError(f"--jobs must be at least 1, got {args.jobs}")
    try:
        n_list = tuple(int(v) for v in args.n_list.split(","))
        q_list = tuple(int(v) for v in args.q_list.split(","))
    except ValueError:
        raise _UsageError("--n-list and --q-list must be comma-separated integers")
    cfg = BenchmarkConfig(scenarios=scenarios, n_list=n_list, q_list=q_list,
                          reps=args.reps, methods=methods, seed=_resolve_seed(args),
                          inv_sqrt_threshold=args.inv_sqrt_threshold,
                          permute_columns=args.permute_columns, reorder=args.reorder,
                          jobs=args.jobs)
    rows = run_benchmark(cfg)
    write_results(args.out, rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
