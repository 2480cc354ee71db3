"""Command-line entry point: ``psifb {run,gaps,gen,lb,schedule}``.

Arms are numbered from 1 in everything printed here (the library itself is
0-based). Exit codes: 0 on success, 2 on a usage error, 1 on a runtime error.
"""

import argparse
import math
import sys

from .envs import BanditInstance, format_instance, gen_experiment, resolve_instance, save_instance
from .exceptions import DegenerateInstanceError
from .harness import (
    ExperimentSpec,
    build_schedule,
    default_budgets,
    emit_csv,
    parse_algorithm,
    run_grid,
)
from .lowerbound import STAIRCASE, class_b_check, lb_value, verify_gap_preservation
from .pareto import complexity_profile, relaxed_profile
from .schedules import validate_schedule


def _algo(text):
    try:
        return parse_algorithm(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _algos(text):
    return [_algo(t) for t in text.split(",") if t.strip()]


def _int_list(text):
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _sigma(text):
    vals = _float_list(text)
    if not vals or any(not (v >= 0 and math.isfinite(v)) for v in vals):
        raise argparse.ArgumentTypeError("sigma must be finite and non-negative")
    return vals[0] if len(vals) == 1 else vals


def _positive(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _arms(idx):
    return "{" + ", ".join(str(int(i) + 1) for i in sorted(idx)) + "}"


def _load(source, seed=0, sigma=None):
    if source == "staircase":
        return BanditInstance(STAIRCASE, 0.25 if sigma is None else sigma, name="staircase")
    return resolve_instance(source, seed=seed, sigma=sigma)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="psifb",
        description="Fixed-budget Pareto set identification: simulations and instance tools.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    inst_help = "exp:N for a generated experiment (N in 1..8) or a path to an instance CSV"

    r = sub.add_parser("run", help="Monte Carlo error estimates over a budget grid (CSV output)")
    r.add_argument("--instance", required=True, help=inst_help)
    r.add_argument("--algo", type=_algos, action="append", required=True,
                   help="algorithm id(s), repeatable or comma-separated: ege-sr, ege-sh, "
                        "ege-gg:R, uniform, ege-sr-k:k, ape-fb:<a>, ape-fb:c=<c>, ape-fb-adapt")
    r.add_argument("--budgets", default="auto",
                   help="comma-separated budgets, or 'auto' for 8 log-spaced points up to "
                        "ceil(H) (default: auto)")
    r.add_argument("--t-max", type=_positive, default=None,
                   help="upper end of the automatic budget grid (default: ceil(H))")
    r.add_argument("--trials", type=_positive, default=100, help="runs per cell (default: 100)")
    r.add_argument("--seed", type=int, default=0, help="master seed of the noise (default: 0)")
    r.add_argument("--instance-seed", type=int, default=0,
                   help="seed for the randomly drawn experiments 1, 4 and 5 (default: 0)")
    r.add_argument("--sigma", type=_sigma, default=None,
                   help="noise scale, scalar or per-objective list (default: the instance's)")
    r.add_argument("--metric", choices=("error", "psi-k"), default="error",
                   help="loss to average (default: error)")
    r.add_argument("--k", type=_positive, default=None, help="relaxation parameter for psi-k")
    r.add_argument("--hv", action="store_true", help="also report the mean hypervolume fraction")
    r.add_argument("--hv-ref", type=_float_list, default=None,
                   help="hypervolume reference point (default: min of the means minus 1e-6)")
    r.add_argument("--workers", type=_positive, default=1, help="worker processes (default: 1)")
    r.add_argument("--timing", action="store_true",
                   help="fill the wall_time column (output is then not reproducible)")
    r.add_argument("--out", default="-", help="output CSV path, '-' for stdout (default: -)")

    g = sub.add_parser("gaps", help="print Pareto set, gaps and complexities of an instance")
    g.add_argument("--instance", required=True, help=inst_help)
    g.add_argument("--instance-seed", type=int, default=0, help="seed for experiments 1, 4, 5")
    g.add_argument("--k", type=_positive, default=None, help="also print the k-relaxed profile")

    n = sub.add_parser("gen", help="write a generated experiment to an instance CSV")
    n.add_argument("--exp", type=int, required=True, choices=range(1, 9), metavar="{1..8}")
    n.add_argument("--seed", type=int, default=0, help="seed for experiments 1, 4, 5 (default: 0)")
    n.add_argument("--sigma", type=_sigma, default=None, help="noise scale (default: 0.25)")
    n.add_argument("--header", action="store_true", help="write a K,D header line")
    n.add_argument("--out", default="-", help="output path, '-' for stdout (default: -)")

    lb = sub.add_parser("lb", help="class check and alternative-instance report")
    lb.add_argument("--instance", default="staircase",
                    help=inst_help + ", or 'staircase' for the built-in 4-arm member "
                         "(default: staircase)")
    lb.add_argument("--variant", choices=("B", "B'"), default="B", help="class to check")
    lb.add_argument("--T", type=float, default=None, help="budget for the bound value")
    lb.add_argument("--sigma", type=float, default=None, help="noise scale for the bound value")

    s = sub.add_parser("schedule", help="print a round schedule")
    s.add_argument("--algo", type=_algo, required=True, help="ege-sr, ege-sh, ege-gg:R or uniform")
    s.add_argument("--K", type=int, required=True, help="number of arms")
    s.add_argument("--T", type=int, required=True, help="budget")
    return p


def _cmd_run(args, out):
    algos = [a for group in args.algo for a in group]
    budgets = None
    if args.budgets != "auto":
        budgets = _int_list(args.budgets)
    spec = ExperimentSpec(
        instance=args.instance, algorithms=algos, budgets=budgets, trials=args.trials,
        seed=args.seed, metric=args.metric, k=args.k, hv=args.hv, hv_ref=args.hv_ref,
        instance_seed=args.instance_seed, sigma=args.sigma,
    )
    if budgets is None and args.t_max is not None:
        spec.budgets = default_budgets(spec.resolve(), t_max=args.t_max)
    rows = run_grid(spec, workers=args.workers, timing=args.timing)
    if args.out == "-":
        emit_csv(rows, out)
    else:
        emit_csv(rows, args.out)
    return 0


def _cmd_gaps(args, out):
    inst = _load(args.instance, seed=args.instance_seed)
    prof = complexity_profile(inst.means)
    print(f"instance: {inst.name}  K={inst.K}  D={inst.D}", file=out)
    print(f"pareto_set: {_arms(prof.pareto)}", file=out)
    print("arm  optimal  gap", file=out)
    for i, g in enumerate(prof.delta):
        print(f"{i + 1:>3}  {'yes' if i in prof.pareto else 'no':>7}  {g:.17g}", file=out)
    print(f"H = {prof.h1:.17g}", file=out)
    print(f"H2 = {prof.h2:.17g}", file=out)
    if args.k is not None:
        rel = relaxed_profile(inst.means, args.k, prof)
        print(f"k = {rel.k}  omega_k = {rel.omega_k:.17g}  H2^(k) = {rel.h2_k:.17g}", file=out)
        print("relaxed gaps: " + ", ".join(f"{g:.17g}" for g in rel.delta_k), file=out)
    return 0


def _cmd_gen(args, out):
    inst = gen_experiment(args.exp, seed=args.seed)
    if args.sigma is not None:
        inst = inst.with_sigma(args.sigma)
    if args.out == "-":
        out.write(format_instance(inst, header=args.header))
    else:
        save_instance(inst, args.out, header=args.header)
    return 0


def _cmd_lb(args, out):
    inst = _load(args.instance)
    rep = class_b_check(inst.means, args.variant)
    print(f"instance: {inst.name}  class {args.variant}: {'member' if rep.member else 'not a member'}",
          file=out)
    shown = rep.describe(base=1)
    for f in shown[:10]:
        print(f"  violated {f}", file=out)
    if len(shown) > 10:
        print(f"  ... {len(shown) - 10} more violations", file=out)
    if rep.member:
        print("arm  moved_axis  pareto_changed  max_rel_gap_deviation  H  H_alt", file=out)
        for i in range(inst.K):
            g = verify_gap_preservation(inst.means, i, rep)
            print(f"{i + 1:>3}  {rep.shift_dims[i] + 1:>10}  {str(g.pareto_changed):>14}  "
                  f"{g.max_rel_deviation:>21.3g}  {g.h1:.17g}  {g.h1_alt:.17g}", file=out)
    if args.T is not None:
        sigma = args.sigma if args.sigma is not None else float(inst.sigma.max())
        h1 = complexity_profile(inst.means).h1
        print(f"lower bound at T={args.T:g}, sigma={sigma:g}: {lb_value(args.T, h1, sigma):.17g}",
              file=out)
    return 0


def _cmd_schedule(args, out):
    s = build_schedule(args.algo, args.K, args.T)
    rep = validate_schedule(s, args.K, args.T)
    print(f"schedule: {s.name}  K={args.K}  T={args.T}  R={s.rounds}", file=out)
    print("lambda = (" + ", ".join(map(str, s.lam)) + ")", file=out)
    print("t = (" + ", ".join(map(str, s.t)) + ")", file=out)
    print("n = (" + ", ".join(map(str, s.cumulative)) + ")", file=out)
    print(f"samples = {s.total} (unused {args.T - s.total})", file=out)
    print("valid" if rep.ok else "invalid: " + "; ".join(rep.violations), file=out)
    return 0


_COMMANDS = {"run": _cmd_run, "gaps": _cmd_gaps, "gen": _cmd_gen, "lb": _cmd_lb,
             "schedule": _cmd_schedule}


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args, out)
    except argparse.ArgumentTypeError as exc:
        parser.print_usage(sys.stderr)
        print(f"psifb: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, DegenerateInstanceError) as exc:
        print(f"psifb: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
