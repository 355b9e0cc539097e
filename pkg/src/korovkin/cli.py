"""Command-line front end.

Exit codes: 0 everything passed, 1 configuration or usage error,
2 a verification failed (error bound or axiom), 3 the positivity
hypothesis inf A(1) > 0 failed.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .axioms import check_axiom, verify_lipschitz_bound
from .bounds import BoundViolationError, PositivityError, convergence_sweep
from .harness import ConfigError, emit_plot_data, list_registry, load_config, run
from .operators import ALL_FLAGS, FAMILIES, M, SL, operator_from_config

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_VIOLATION = 2
EXIT_HYPOTHESIS = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; here 2 means "verification
    # failed", so usage problems are remapped to the config exit code.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _build_parser() -> _Parser:
    parser = _Parser(prog="korovkin", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute an experiment config (TOML)")
    p_run.add_argument("config", help="path to the experiment file")
    p_run.add_argument("--output-dir", default=None, help="override the output directory")

    sub.add_parser("list", help="print operator families, corpus functions, axiom flags")

    p_ax = sub.add_parser("check-axioms", help="randomized axiom suite for one operator")
    p_ax.add_argument("family", choices=sorted(FAMILIES))
    p_ax.add_argument("--n", type=int, default=8, help="degree for families that need one")
    p_ax.add_argument("--phi", default="identity", choices=["identity", "quadratic"])
    p_ax.add_argument("--grid-points", type=int, default=257)
    p_ax.add_argument("--trials", type=int, default=500)
    p_ax.add_argument("--seed", type=int, default=0)
    p_ax.add_argument("--axiom", default=None, choices=list(ALL_FLAGS),
                      help="check one flag instead of everything claimed")

    p_sw = sub.add_parser("sweep", help="convergence table for one family and function")
    p_sw.add_argument("family", choices=sorted(FAMILIES))
    p_sw.add_argument("function")
    p_sw.add_argument("--n-min", type=int, default=4)
    p_sw.add_argument("--n-max", type=int, default=64)
    p_sw.add_argument("--phi", default="identity", choices=["identity", "quadratic"])
    p_sw.add_argument("--reference-scale", type=float, default=1.0)
    p_sw.add_argument("--grid-points", type=int, default=None)
    p_sw.add_argument("--output", default=None, help="also write the table as CSV")
    return parser


def _cmd_run(args) -> int:
    config = load_config(args.config)
    manifest = run(config, output_dir=args.output_dir)
    print(f"run '{manifest.name}' complete; outputs in {manifest.output_dir}")
    for name in sorted(manifest.checksums):
        print(f"  {name}")
    if manifest.axiom_failures:
        print(f"axiom failures: {manifest.axiom_failures}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def _cmd_check_axioms(args) -> int:
    record = {"family": args.family, "phi": args.phi, "grid_points": args.grid_points}
    if FAMILIES[args.family]["needs_n"]:
        record["n"] = args.n
    T = operator_from_config(record)
    flags = [args.axiom] if args.axiom else [fl for fl in ALL_FLAGS if fl in T.claims]
    failed = 0
    # A finished run at the requested trial count is conclusive by request.
    min_trials = args.trials
    for flag in flags:
        rep = check_axiom(T, flag, trials=args.trials, seed=args.seed, min_trials=min_trials)
        print(f"{rep.operator}: {flag:9s} {rep.verdict} "
              f"(trials={rep.trials}, worst_violation={rep.worst_violation:.3e})")
        if rep.verdict == "fail":
            failed += 1
            wit = rep.witness
            print(f"  witness: {wit.description}; point {wit.point}, "
                  f"lhs={wit.lhs!r}, rhs={wit.rhs!r}, violation={wit.violation:.3e}")
    if not args.axiom and {SL, M} <= set(T.claims):
        rep = verify_lipschitz_bound(T, trials=args.trials, seed=args.seed, min_trials=min_trials)
        print(f"{rep.operator}: LIPSCHITZ {rep.verdict} "
              f"(trials={rep.trials}, worst_violation={rep.worst_violation:.3e})")
        failed += rep.verdict == "fail"
    return EXIT_VIOLATION if failed else EXIT_OK


def _cmd_sweep(args) -> int:
    if args.n_min < 1 or args.n_max < args.n_min:
        raise ConfigError("need 1 <= n-min <= n-max")
    ns = []
    n = args.n_min
    while n <= args.n_max:
        ns.append(n)
        n *= 2
    t_config = {"family": args.family, "phi": args.phi}
    a_config = {"family": "composition", "phi": args.phi, "scale": args.reference_scale}
    table = convergence_sweep(
        t_config, a_config, args.function, ns, grid_points=args.grid_points
    )
    header = f"{'n':>5s} {'mu':>12s} {'omega':>12s} {'lhs':>12s} {'rhs':>12s} {'margin':>12s} pass"
    print(header)
    for rep in table.reports:
        print(f"{rep.n:5d} {rep.mu:12.6g} {rep.omega_f_mu:12.6g} "
              f"{rep.lhs:12.6g} {rep.rhs:12.6g} {rep.margin:12.6g} {rep.passed}")
    lhs_slope, rhs_slope = table.rate_slopes()
    fmt = lambda s: "n/a" if s is None else f"{s:.4f}"
    print(f"rate fit (upper half): lhs slope {fmt(lhs_slope)}, rhs slope {fmt(rhs_slope)}")
    if args.output:
        table.to_csv(args.output)
        emit_plot_data(table, Path(args.output).with_suffix(".plot.csv"))
        print(f"wrote {args.output}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "list":
            list_registry()
            return EXIT_OK
        if args.command == "check-axioms":
            return _cmd_check_axioms(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except BoundViolationError as exc:
        print(f"bound violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except PositivityError as exc:
        print(f"hypothesis failure: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (ConfigError, KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
