"""Command-line interface.

Exit codes: 0 feasible / success, 1 infeasible / check failed, 2 input error.
Thread identities print 1-based as ``task.subprogram.job``; ``-`` is idle.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from mtsched import systemio
from mtsched.analysis import analyze, simulate
from mtsched.experiment import (
    RECORD_FIELDS,
    run_experiment,
    success_table,
    wcrt_table,
    write_csv,
)
from mtsched.model import DEFAULT_HYPERPERIOD_BOUND, HyperperiodOverflow
from mtsched.multiphase import unpredictability_demo
from mtsched.schedulers import SCHEDULER_NAMES, resolve_scheduler
from mtsched.taskgen import DISTRIBUTIONS, GenConfig, generate_system

OUT_ENV = "MTSCHED_OUT"

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _out_dir(arg: str | None) -> Path:
    path = Path(arg or os.environ.get(OUT_ENV) or ".")
    path.mkdir(parents=True, exist_ok=True)
    return path


def cell_label(cell) -> str:
    if cell is None:
        return "-"
    return ".".join(str(v + 1) for v in cell)


def _load(args):
    system = systemio.load(args.system)
    sched = resolve_scheduler(args.sched, system, args.order)
    return system, sched


def cmd_analyze(args) -> int:
    system, sched = _load(args)
    verdict = analyze(system, sched, args.max_hyperperiod)
    print(json.dumps(verdict.to_dict(), indent=2))
    return EXIT_OK if verdict.feasible else EXIT_FAIL


def write_trace(result, m: int, fh) -> None:
    fh.write(",".join(["t"] + [f"proc{p}" for p in range(m)]) + "\n")
    for t, cells in result.trace.rows():
        fh.write(",".join([str(t)] + [cell_label(c) for c in cells]) + "\n")


def cmd_simulate(args) -> int:
    system, sched = _load(args)
    result = simulate(system, sched, args.horizon)
    if args.out:
        with open(args.out, "w") as fh:
            write_trace(result, system.processors, fh)
    else:
        write_trace(result, system.processors, sys.stdout)
    for miss in result.misses:
        print(f"miss {cell_label(miss.ident)} at {miss.deadline}", file=sys.stderr)
    return EXIT_OK


def cmd_gen(args) -> int:
    dists = DISTRIBUTIONS if args.dist == "all" else (args.dist,)
    systems = []
    for m in args.m:
        for dist in dists:
            for i in range(args.count):
                cfg = GenConfig(m, dist, seed=args.seed + i)
                systems.append((f"m{m}_{dist}_{args.seed + i}", generate_system(cfg)))
    if len(systems) == 1 and not args.out:
        print(systemio.dumps(systems[0][1]))
        return EXIT_OK
    out = _out_dir(args.out)
    for name, system in systems:
        systemio.dump(system, out / f"{name}.json")
    print(f"wrote {len(systems)} systems to {out}", file=sys.stderr)
    return EXIT_OK


def cmd_experiment(args) -> int:
    dists = DISTRIBUTIONS if args.dist == "all" else (args.dist,)
    counts = {(m, d): args.count for m in args.m for d in dists}
    out = _out_dir(args.out)
    start = time.time()
    records = run_experiment(counts, args.seed, args.workers)
    write_csv([r.row() for r in records], out / "records.csv", RECORD_FIELDS)
    write_csv(success_table(records), out / "success_ratio.csv")
    write_csv(wcrt_table(records), out / "wcrt.csv")
    print(f"{len(records)} systems in {time.time() - start:.1f}s -> {out}", file=sys.stderr)
    return EXIT_OK


def cmd_demo(args) -> int:
    report = unpredictability_demo()
    ok = (report.full_completion, report.reduced_completion) == (2, 4)
    if args.json:
        print(json.dumps(report.to_dict()))
    else:
        status = "PREDICTABILITY VIOLATED" if report.violated else "no violation"
        print(f"full={report.full_completion} reduced={report.reduced_completion} {status}")
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mtsched", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def sched_args(p):
        p.add_argument("system", help="system JSON file")
        p.add_argument("--sched", default="dm-im",
                       help=f"one of {', '.join(SCHEDULER_NAMES)} (default dm-im)")
        p.add_argument("--order", help="explicit 1-based order: '2,1,3' or '1.1,2.1,1.2'")

    p = sub.add_parser("analyze", help="exact schedulability verdict as JSON")
    sched_args(p)
    p.add_argument("--max-hyperperiod", type=int, default=DEFAULT_HYPERPERIOD_BOUND)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="per-instant schedule as CSV")
    sched_args(p)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gen", help="generate random systems")
    p.add_argument("--m", type=int, nargs="+", default=[4])
    p.add_argument("--dist", default="uniform", choices=DISTRIBUTIONS + ("all",))
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help=f"output directory (default ${OUT_ENV} or .)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("experiment", help="success-ratio and WCRT study")
    p.add_argument("--m", type=int, nargs="+", default=[2, 4, 8])
    p.add_argument("--dist", default="all", choices=DISTRIBUTIONS + ("all",))
    p.add_argument("--count", type=int, default=400, help="systems per (m, distribution)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help=f"output directory (default ${OUT_ENV} or .)")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("demo-multiphase", help="multi-phase unpredictability example")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, HyperperiodOverflow) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
