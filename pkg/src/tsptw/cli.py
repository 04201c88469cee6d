"""Command-line entry point: ``tsptw <subcommand> [options]``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import bench, oracle
from .duration import ScaleTooFine, solve_duration, solve_duration_reversed
from .generate import FAMILIES, GeneratorSpec, generate_text
from .instances import InstanceFormatError, format_scaled, load
from .model import PLUS_INF, Status, reverse, reverse_route
from .preprocess import build, dump
from .search import Budget, solve_makespan

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_BUDGET = 3
EXIT_USAGE = 64
EXIT_DATA = 65

log = logging.getLogger("tsptw")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--time-limit", type=float, metavar="SEC", help="wall-clock budget in seconds")
    p.add_argument("--memory-limit", type=float, metavar="MB", help="label memory budget in MB")
    p.add_argument("--scale", type=int, metavar="D", help="decimal digits kept from the file (times are scaled by 10^D)")
    p.add_argument("--format", choices=("matrix", "coords"), default="matrix")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reverse", action="store_true", help="work on the time-mirrored network")
    p.add_argument("--csv", type=Path, metavar="PATH", help="write CSV records here")
    p.add_argument("--verbose", "-v", action="store_true")
    return p


def make_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="tsptw", description="Exact TSPTW solver (makespan and duration objectives).")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve-makespan", parents=[common], help="minimize the arrival at the end depot")
    p.add_argument("instance", type=Path)
    p.add_argument("--t0", type=int, default=0, help="departure time in scaled units")
    p.add_argument("--no-dominance", action="store_true")
    p.add_argument("--no-unreachable", action="store_true")

    p = sub.add_parser("solve-duration", parents=[common], help="minimize arrival minus departure")
    p.add_argument("instance", type=Path)
    p.add_argument("--allow-fine-scale", action="store_true", help="scan departures even at scale >= 4")

    p = sub.add_parser("preprocess", parents=[common], help="print tightened windows, precedences and U")
    p.add_argument("instance", type=Path)

    p = sub.add_parser("generate", parents=[common], help="write a generated instance")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sigma", type=int, default=100)
    p.add_argument("--omega", type=int, default=40)
    p.add_argument("--beta", default="1")
    p.add_argument("--output", "-o", type=Path, help="file to write (default stdout)")

    p = sub.add_parser("bench", parents=[common], help="solve every file of a directory")
    p.add_argument("directory", type=Path)
    p.add_argument("--mode", choices=bench.MODES, default="makespan")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--allow-fine-scale", action="store_true")

    p = sub.add_parser("oracle", parents=[common], help="brute-force reference values (small instances)")
    p.add_argument("instance", type=Path)
    p.add_argument("--kind", choices=("makespan", "heldkarp", "duration", "routes"), default="makespan")
    p.add_argument("--t0", type=int, default=0)
    return parser


def _fmt(value, scale) -> str:
    if value is None or value == PLUS_INF:
        return "inf"
    return format_scaled(int(value), scale)


def _status_code(status: Status) -> int:
    if status is Status.OPTIMAL:
        return EXIT_OK
    if status is Status.INFEASIBLE:
        return EXIT_INFEASIBLE
    return EXIT_BUDGET


def _write_csv(path, records) -> None:
    if path is not None:
        path.write_text(bench.to_csv(records))


def cmd_solve_makespan(args, inst) -> int:
    budget = Budget.from_limits(args.time_limit, args.memory_limit)
    target = reverse(inst) if args.reverse else inst
    out = solve_makespan(target, args.t0, budget, dominance=not args.no_dominance, unreachable=not args.no_unreachable)
    route = out.route
    if route is not None and args.reverse:
        route = reverse_route(inst, route)
    print(f"instance   {inst.name}")
    print(f"status     {out.status}")
    print(f"makespan   {_fmt(out.objective, inst.scale)}")
    print(f"route      {' '.join(map(str, route)) if route else '-'}")
    print(f"labels     {out.labels_created} created, {out.labels_dominated} dominated, {out.labels_pruned} pruned")
    print(f"calls      {out.decision_calls}")
    print(f"time       {out.elapsed:.3f}s")
    rec = bench.BenchRecord(
        inst.name, "makespan", str(out.status), "" if out.objective is None else _fmt(out.objective, inst.scale),
        int(round(out.elapsed * 1000)), out.labels_created, out.labels_dominated, out.labels_pruned,
    )
    _write_csv(args.csv, [rec])
    return _status_code(out.status)


def cmd_solve_duration(args, inst) -> int:
    budget = Budget.from_limits(args.time_limit, args.memory_limit)
    solver = solve_duration_reversed if args.reverse else solve_duration
    if args.verbose:
        log.info("exact re-solves use ub = min(latest departure of any route + incumbent duration, T + 1)")
    try:
        out = solver(inst, budget, allow_fine_scale=args.allow_fine_scale)
    except ScaleTooFine as exc:
        print(f"tsptw: {exc}", file=sys.stderr)
        return EXIT_DATA
    print(f"instance   {inst.name}")
    print(f"status     {out.status}")
    print(f"duration   {_fmt(out.duration, inst.scale)}")
    print(f"departure  {_fmt(out.departure, inst.scale)}")
    print(f"route      {' '.join(map(str, out.route)) if out.route else '-'}")
    print(f"calls      {out.makespan_calls} makespan solves, {out.windows_scanned} departures scanned")
    print(f"time       {out.elapsed:.3f}s")
    rec = bench.BenchRecord(
        inst.name, "duration_reversed" if args.reverse else "duration", str(out.status),
        "" if out.duration is None else _fmt(out.duration, inst.scale), int(round(out.elapsed * 1000)),
        out.labels_created, out.labels_dominated, out.labels_pruned, out.makespan_calls,
    )
    _write_csv(args.csv, [rec])
    return _status_code(out.status)


def cmd_preprocess(args, inst) -> int:
    result = build(reverse(inst) if args.reverse else inst)
    sys.stdout.write(dump(result))
    return EXIT_OK if result.feasible else EXIT_INFEASIBLE


def cmd_oracle(args, inst) -> int:
    target = reverse(inst) if args.reverse else inst
    try:
        if args.kind == "routes":
            routes = sorted(oracle.enumerate_feasible_routes(target))
            for r in routes:
                print(" ".join(map(str, r)))
            return EXIT_OK if routes else EXIT_INFEASIBLE
        if args.kind == "makespan":
            res = oracle.enumerate_makespan(target, args.t0)
        elif args.kind == "heldkarp":
            res = oracle.heldkarp_makespan(target, args.t0)
        else:
            res = oracle.oracle_duration(target)
    except ValueError as exc:
        print(f"tsptw: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"objective  {_fmt(res.objective, inst.scale)}")
    print(f"route      {' '.join(map(str, res.route)) if res.route else '-'}")
    if res.departure is not None:
        print(f"departure  {_fmt(res.departure, inst.scale)}")
    return EXIT_OK if res.route else EXIT_INFEASIBLE


def cmd_generate(args) -> int:
    try:
        spec = GeneratorSpec(args.family, args.n, args.sigma, args.omega, args.beta, args.seed, args.scale or 0)
    except ValueError as exc:
        print(f"tsptw: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = generate_text(spec)
    if args.output:
        args.output.write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_bench(args) -> int:
    if not args.directory.is_dir():
        print(f"tsptw: {args.directory} is not a directory", file=sys.stderr)
        return EXIT_USAGE
    records, summary = bench.run_bench(
        args.directory, args.mode, args.time_limit, args.memory_limit, args.format, args.scale,
        args.workers, args.allow_fine_scale,
    )
    text = bench.to_csv(records)
    if args.csv:
        args.csv.write_text(text)
    else:
        sys.stdout.write(text)
    mean = "-" if summary.mean_time is None else f"{summary.mean_time:.0f}"
    worst = "-" if summary.max_time is None else f"{summary.max_time:.0f}"
    print(f"# count={summary.count} s={summary.solved} t_s={mean} m_s={worst}", file=sys.stderr)
    return EXIT_OK


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    if args.command == "generate":
        return cmd_generate(args)
    if args.command == "bench":
        return cmd_bench(args)
    try:
        inst = load(args.instance, args.format, args.scale)
    except OSError as exc:
        print(f"tsptw: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InstanceFormatError as exc:
        print(f"tsptw: {args.instance}: {exc}", file=sys.stderr)
        return EXIT_DATA
    handlers = {
        "solve-makespan": cmd_solve_makespan,
        "solve-duration": cmd_solve_duration,
        "preprocess": cmd_preprocess,
        "oracle": cmd_oracle,
    }
    return handlers[args.command](args, inst)


if __name__ == "__main__":
    sys.exit(main())
