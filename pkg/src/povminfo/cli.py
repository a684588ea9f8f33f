"""Command-line interface: ``povminfo {sweep,optimize,simulate,verify}``.

Exit codes: 0 success, 1 usage or verification failure, 2 numerical
non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import information
from .exceptions import DomainError, InfeasibleError
from .optimize import (
    OptimizerConfig,
    optimize_generalized,
    optimize_matrix_povm,
    optimize_projective,
)
from .states import make_state_pair

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NONCONVERGED = 2

SWEEP_COLUMNS = ("alpha_rad", "chi_povm", "chi_holevo", "gap")


@dataclass(frozen=True)
class SweepRow:
    alpha_rad: float
    chi_povm: float
    chi_holevo: float
    gap: float
    converged: bool | None = None


def _grid(alpha_min, alpha_max, steps):
    if steps == 1:
        return [alpha_min]
    width = alpha_max - alpha_min
    return [alpha_min + width * k / (steps - 1) for k in range(steps)]


def sweep_rows(alpha_min, alpha_max, steps, prior_p=0.5, config=None, workers=1):
    """Optimal-measurement information and Holevo bound along an alpha grid.

    Equal priors use the closed form; other priors run the projective
    optimizer at each point and record whether it converged.
    """
    if not 0.0 <= alpha_min <= alpha_max <= math.pi / 2 + 1e-12:
        raise DomainError("alpha_min/alpha_max", (alpha_min, alpha_max),
                          "need 0 <= alpha_min <= alpha_max <= pi/2")
    if steps < 2:
        raise DomainError("steps", steps, "steps must be at least 2")
    config = config or OptimizerConfig()
    equal = prior_p == 0.5

    def row(alpha):
        pair = make_state_pair(alpha, prior_p)
        holevo = information.holevo_bound(pair)
        if equal:
            chi, conv = information.optimal_projective_chi(pair.alpha), None
        else:
            res = optimize_projective(pair, config)
            chi, conv = res.chi_opt, res.converged
        return SweepRow(pair.alpha, chi, holevo, holevo - chi, conv)

    grid = _grid(alpha_min, alpha_max, steps)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(row, grid))
    return [row(a) for a in grid]


def _fmt(x):
    return format(x, ".12g")


def write_sweep(rows, stream, fmt="csv"):
    with_conv = any(r.converged is not None for r in rows)
    columns = SWEEP_COLUMNS + (("converged",) if with_conv else ())
    if fmt == "json":
        out = []
        for r in rows:
            d = {c: getattr(r, c) for c in columns}
            out.append(d)
        json.dump(out, stream, indent=1)
        stream.write("\n")
        return
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        line = [_fmt(r.alpha_rad), _fmt(r.chi_povm), _fmt(r.chi_holevo), _fmt(r.gap)]
        if with_conv:
            line.append(str(bool(r.converged)).lower())
        writer.writerow(line)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _angle(args, value):
    return math.radians(value) if args.degrees else value


def _config(args):
    return OptimizerConfig(
        restarts=args.restarts,
        seed=args.seed,
        max_iterations=getattr(args, "max_iterations", 2000),
        workers=getattr(args, "workers", 1),
    )


def cmd_sweep(args):
    rows = sweep_rows(
        _angle(args, args.alpha_min),
        _angle(args, args.alpha_max),
        args.steps,
        args.prior_p,
        _config(args),
        args.workers,
    )
    if args.out in (None, "-"):
        write_sweep(rows, sys.stdout, args.format)
    else:
        buf = io.StringIO()
        write_sweep(rows, buf, args.format)
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(buf.getvalue())
        except OSError as exc:
            print(f"cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_USAGE
    if any(r.converged is False for r in rows):
        return EXIT_NONCONVERGED
    return EXIT_OK


def cmd_optimize(args):
    pair = make_state_pair(_angle(args, args.alpha), args.prior_p)
    config = _config(args)
    try:
        if args.outcomes > 2:
            if args.subchannels != 1:
                raise DomainError("subchannels", args.subchannels,
                                  "--outcomes > 2 searches matrix POVMs; use --subchannels 1")
            result = optimize_matrix_povm(pair, args.outcomes, config)
        elif args.outcomes == 2:
            result = optimize_generalized(pair, args.subchannels, config)
        else:
            raise DomainError("outcomes", args.outcomes, "--outcomes must be at least 2")
    except InfeasibleError as exc:
        print(json.dumps({"error": str(exc), "converged": False}))
        return EXIT_NONCONVERGED
    print(json.dumps(result.to_dict()))
    residuals = [v for v in result.constraint_residuals.values() if isinstance(v, float)]
    ok = result.converged and all(v < args.tol for v in residuals)
    return EXIT_OK if ok else EXIT_NONCONVERGED


def cmd_simulate(args):
    from .simulate import empirical_mutual_information, simulate_game

    pair = make_state_pair(_angle(args, args.alpha), args.prior_p)
    best = optimize_projective(pair, OptimizerConfig(seed=args.seed))
    counts = simulate_game(pair, best.povm, args.trials, args.seed)
    empirical = empirical_mutual_information(counts)
    out = counts.to_dict()
    out.update(
        empirical_mi=empirical,
        analytic_mi=best.chi_opt,
        abs_difference=abs(empirical - best.chi_opt),
    )
    print(json.dumps(out))
    return EXIT_OK


def cmd_verify(args):
    from .verification import run_checks

    only = None
    if args.only:
        only = {int(tok) for tok in args.only.split(",") if tok.strip()}
    results = run_checks(only=only, stream=sys.stdout)
    return EXIT_OK if all(r.passed for r in results) else EXIT_USAGE


def build_parser():
    parser = _Parser(prog="povminfo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, restarts=32):
        p.add_argument("--prior-p", type=float, default=0.5)
        p.add_argument("--degrees", action="store_true", help="angles given in degrees")
        p.add_argument("--restarts", type=int, default=restarts)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("sweep", help="tabulate optimal information and Holevo bound over alpha")
    common(p, restarts=8)
    p.add_argument("--alpha-min", type=float, default=0.0)
    p.add_argument("--alpha-max", type=float, default=math.pi / 2)
    p.add_argument("--steps", type=int, default=181)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize", help="maximize information for one state pair")
    common(p)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--subchannels", type=int, default=1)
    p.add_argument("--outcomes", type=int, default=2)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iterations", type=int, default=2000)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("simulate", help="Monte Carlo replay with the optimal projective readout")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--prior-p", type=float, default=0.5)
    p.add_argument("--trials", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--degrees", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run the acceptance checks")
    p.add_argument("--only", default="", help="comma-separated criterion numbers")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, ValueError) as exc:
        print(f"povminfo {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
