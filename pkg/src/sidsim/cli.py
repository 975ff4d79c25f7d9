"""Command-line entry point: ``sidsim {simulate,sweep,figure,optimize}``.

Exit codes: 0 success, 2 validation/usage error, 3 infeasible optimisation.
"""

from __future__ import annotations

import argparse
import sys

from .core import InvalidInput
from .network import Objective, optimize_assignment
from .scenario import (PRESETS, ResultTable, ScenarioError, load_scenario, run_preset, run_sweep,
                       simulate)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3


def _global_flags() -> argparse.ArgumentParser:
    # SUPPRESS lets the flags appear before or after the subcommand
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                   help="RNG seed (u64); overrides the scenario's seed")
    p.add_argument("--format", choices=["csv"], default=argparse.SUPPRESS)
    p.add_argument("--jobs", type=int, default=argparse.SUPPRESS,
                   help="worker processes for sweeps (output is identical for any value)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = argparse.ArgumentParser(prog="sidsim", parents=[common],
                                     description="Surveillance and intervention link simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="evaluate every link/SID pair")
    p.add_argument("scenario")
    p.add_argument("--out")

    p = sub.add_parser("sweep", parents=[common], help="run the scenario's [sweep]")
    p.add_argument("scenario")
    p.add_argument("--out", required=True)

    p = sub.add_parser("figure", parents=[common], help="regenerate a figure's data")
    p.add_argument("name", choices=PRESETS)
    p.add_argument("--out", required=True)

    p = sub.add_parser("optimize", parents=[common], help="plan SID assignments")
    p.add_argument("scenario")
    p.add_argument("--objective", required=True, choices=[o.value for o in Objective])
    p.add_argument("--method", default="auto", choices=["auto", "exhaustive", "greedy"])
    p.add_argument("--out")
    return parser


def _emit(table: ResultTable, out: str | None) -> None:
    if out:
        table.write(out)
    else:
        sys.stdout.write(table.to_csv())


def _plan_table(plan) -> ResultTable:
    rows = []
    for sid, d in sorted(plan.decisions.items()):
        tx = d.link.tx if d.link else ""
        rx = d.link.rx if d.link else ""
        rows.append((sid, tx, rx, d.band or "", d.mode.value, plan.objective_value))
    return ResultTable(["sid", "target_tx", "target_rx", "band", "mode", "objective"], rows)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    seed = getattr(args, "seed", None)
    jobs = getattr(args, "jobs", 1)
    if seed is not None and not 0 <= seed < 2 ** 64:
        parser.error("--seed must be an unsigned 64-bit integer")
    try:
        if args.command == "figure":
            _emit(run_preset(args.name, jobs=jobs), args.out)
        elif args.command == "sweep":
            run_sweep(load_scenario(args.scenario), args.out, jobs=jobs)
        elif args.command == "simulate":
            _emit(simulate(load_scenario(args.scenario), seed=seed), args.out)
        elif args.command == "optimize":
            sf = load_scenario(args.scenario)
            plan = optimize_assignment(sf.scenario, Objective(args.objective), method=args.method)
            _emit(_plan_table(plan), args.out)
            for node, slack in sorted(plan.constraint_slacks.items()):
                print(f"slack {node}: {slack:.6e} W", file=sys.stderr)
            if not plan.feasible:
                print("no plan satisfies every interference cap; all SIDs idle", file=sys.stderr)
                return EXIT_INFEASIBLE
    except (ScenarioError, InvalidInput) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
