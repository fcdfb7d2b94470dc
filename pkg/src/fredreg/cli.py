"""Command-line front end for the benchmark experiment.

Two subcommands drive the built-in problem:

* ``solve``: one (noise level, seed) reconstruction, printing the
  iteration trace and summary, optionally writing the reconstruction.
* ``table``: the full sweep over noise levels, seeds and schemes,
  printing median-aggregated results and optionally writing the row CSV.

Exit codes: 0 on success, 2 on configuration errors, 3 when any run
stopped for a reason other than the discrepancy rule.
"""

import argparse
import sys

import numpy as np

from .assembly import OperatorCache
from .experiment import (
    PAPER_NOISE_LEVELS,
    NoiseSpec,
    add_noise,
    avg_error,
    exact_problem,
    run_table,
    sample_grid,
)
from .iteration import SolverConfig, run_adaptive, run_fixed

_OK_STOPS = ("discrepancy_met", "initial_below_threshold")


def _float_list(text):
    return [float(tok) for tok in text.split(",") if tok]


def _seed_list(text):
    seeds = [int(tok) for tok in text.split(",") if tok]
    if any(s < 0 for s in seeds):
        raise argparse.ArgumentTypeError("seeds must be non-negative integers")
    return seeds


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fredreg",
        description="Adaptive-rank iterative regularization benchmark runner.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--alpha0", type=float, default=1.0, help="initial scale a_0")
        p.add_argument("--q", type=float, default=0.25, help="geometric ratio in (0,1)")
        p.add_argument("--C", type=float, default=2.01, help="discrepancy constant > 2")
        p.add_argument("--eps", type=float, default=0.99, help="discrepancy exponent in (0,1)")
        p.add_argument("--eta", type=float, default=10.0, help="level-rule relaxation >= 10")
        p.add_argument("--max-iter", type=int, default=50, help="iteration cap")
        p.add_argument("--m-cap", type=int, default=6, help="maximum dyadic level")
        p.add_argument(
            "--gnm-variant",
            choices=("formal", "listing"),
            default="formal",
            help="discrepancy recursion variant (keep or drop the 1-q factor)",
        )
        p.add_argument(
            "--preset",
            choices=("paper",),
            default=None,
            help="named constant preset (the defaults already match it)",
        )
        p.add_argument("--out", default=None, help="output CSV path")

    solve = sub.add_parser("solve", help="run a single reconstruction")
    add_common(solve)
    solve.add_argument("--noise", type=_float_list, default=[0.05], help="relative noise level")
    solve.add_argument("--seed", type=_seed_list, default=[0], help="RNG seed")
    solve.add_argument("--seeds", type=int, default=None, help="unsupported for solve")
    solve.add_argument(
        "--scheme", choices=("adaptive", "fixed", "both"), default="adaptive"
    )
    solve.add_argument("--fixed-m", type=int, default=4, help="level of the fixed scheme")

    table = sub.add_parser("table", help="run the noise-level sweep")
    add_common(table)
    table.add_argument(
        "--noise",
        type=_float_list,
        default=list(PAPER_NOISE_LEVELS),
        help="comma-separated relative noise levels",
    )
    table.add_argument("--seed", type=_seed_list, default=None, help="explicit seed list")
    table.add_argument("--seeds", type=int, default=None, help="use seeds 0..n-1")
    table.add_argument("--scheme", choices=("adaptive", "fixed", "both"), default="both")
    table.add_argument("--fixed-m", type=int, default=4, help="level of the fixed scheme")

    return parser


def _cmd_solve(args):
    if len(args.noise) != 1 or len(args.seed) != 1:
        print("solve takes exactly one --noise level and one --seed", file=sys.stderr)
        return 2
    if args.seeds is not None:
        print("solve does not accept --seeds; use --seed", file=sys.stderr)
        return 2
    config = SolverConfig(
        alpha0=args.alpha0, q=args.q, C=args.C, eps=args.eps, eta=args.eta,
        max_iter=args.max_iter, m_cap=args.m_cap, gnm_variant=args.gnm_variant,
    )
    level, seed = args.noise[0], args.seed[0]
    problem = exact_problem()
    ops = OperatorCache(problem.kernel)
    grid = sample_grid(config.m_cap)
    f_samples = problem.exact_rhs(grid)
    noisy, delta_abs = add_noise(f_samples, NoiseSpec(rel_level=level, seed=seed))

    schemes = ("adaptive", "fixed") if args.scheme == "both" else (args.scheme,)
    failed = False
    reconstructions = {}
    for scheme in schemes:
        if scheme == "adaptive":
            outcome = run_adaptive(ops, noisy, delta_abs, config)
        else:
            outcome = run_fixed(ops, noisy, delta_abs, config, args.fixed_m)
        avg = avg_error(outcome.solution, problem.exact_solution)
        reconstructions[scheme] = outcome
        print(f"[{scheme}] noise={level:g} seed={seed} delta_abs={delta_abs:.6e} "
              f"threshold={outcome.threshold:.6e}")
        print("  n        a_n   m  m_raw      |gamma|            G")
        for rec in outcome.trace:
            print(f"  {rec.n:2d} {rec.a:10.3e} {rec.m:3d} {rec.m_raw:5d} "
                  f"{rec.gamma_norm:12.5e} {rec.G:12.5e}")
        print(f"  stop={outcome.stop_reason} n_delta={outcome.n_delta} "
              f"m_final={outcome.m_final} G_final={outcome.G_final:.6e} avg={avg:.6f}")
        failed = failed or outcome.stop_reason not in _OK_STOPS

    if args.out:
        t = 0.01 * np.arange(100)
        sols = {s: reconstructions[s].solution.evaluate(t) for s in schemes}
        lines = ["t," + ",".join(f"u_{s}" for s in schemes) + ",u_exact"]
        for i, ti in enumerate(t):
            vals = ",".join(repr(float(sols[s][i])) for s in schemes)
            lines.append(f"{float(ti)!r},{vals},{float(ti)!r}")
        with open(args.out, "w") as handle:
            handle.write("\n".join(lines) + "\n")
    return 3 if failed else 0


def _cmd_table(args):
    config = SolverConfig(
        alpha0=args.alpha0, q=args.q, C=args.C, eps=args.eps, eta=args.eta,
        max_iter=args.max_iter, m_cap=args.m_cap, gnm_variant=args.gnm_variant,
    )
    if args.seed is not None and args.seeds is not None:
        print("give either --seed or --seeds, not both", file=sys.stderr)
        return 2
    if args.seed is not None:
        seeds = args.seed
    else:
        seeds = list(range(args.seeds if args.seeds is not None else 20))
    if not seeds or not args.noise:
        print("need at least one seed and one noise level", file=sys.stderr)
        return 2
    for level in args.noise:
        if not 0.0 < level < 1.0:
            print(f"noise level must lie in (0, 1), got {level}", file=sys.stderr)
            return 2
    rows = run_table(
        config=config,
        levels=args.noise,
        seeds=seeds,
        schemes=args.scheme,
        fixed_m=args.fixed_m,
        out_path=args.out,
        echo=True,
    )
    if any(r.stop_reason not in _OK_STOPS for r in rows):
        return 3
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "solve":
            return _cmd_solve(args)
        return _cmd_table(args)
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


def run():
    raise SystemExit(main())


if __name__ == "__main__":
    run()
