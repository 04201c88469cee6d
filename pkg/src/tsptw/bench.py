"""Batch runner producing one CSV record per instance and a solved/time summary."""

from __future__ import annotations

import csv
import io
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from .duration import solve_duration, solve_duration_reversed
from .instances import InstanceFormatError, format_scaled, load
from .search import Budget, solve_makespan

log = logging.getLogger(__name__)

MODES = ("makespan", "duration", "duration_reversed")
DEFAULT_TIME_LIMIT = {"makespan": 180.0, "duration": 1800.0, "duration_reversed": 1800.0}
CSV_HEADER = ["instance", "mode", "status", "objective", "time_ms", "labels", "dominated", "pruned"]
SOLVED = ("Optimal", "Infeasible")


@dataclass
class BenchRecord:
    instance: str
    mode: str
    status: str
    objective: str = ""
    time_ms: int = 0
    labels: int = 0
    dominated: int = 0
    pruned: int = 0
    makespan_calls: int = 0

    def row(self) -> list:
        return [self.instance, self.mode, self.status, self.objective, self.time_ms, self.labels, self.dominated, self.pruned]


@dataclass
class BenchSummary:
    count: int
    solved: int
    mean_time: Optional[float]  # seconds, over solved instances
    max_time: Optional[float]


def run_one(path, mode: str, time_limit=None, memory_mb=None, fmt="matrix", scale=None, allow_fine_scale=False) -> BenchRecord:
    """Solve one file in a fresh state; parse errors become an ``Error`` record."""
    path = Path(path)
    try:
        inst = load(path, fmt, scale)
    except (InstanceFormatError, OSError, ValueError) as exc:
        log.warning("%s: %s", path.name, exc)
        return BenchRecord(path.stem, mode, "Error")
    if time_limit is None:
        time_limit = DEFAULT_TIME_LIMIT[mode]
    budget = Budget.from_limits(time_limit, memory_mb)
    started = time.perf_counter()
    if mode == "makespan":
        out = solve_makespan(inst, 0, budget)
        calls = out.decision_calls
    elif mode in ("duration", "duration_reversed"):
        solver = solve_duration if mode == "duration" else solve_duration_reversed
        try:
            out = solver(inst, budget, allow_fine_scale=allow_fine_scale)
        except ValueError as exc:
            log.warning("%s: %s", inst.name, exc)
            return BenchRecord(inst.name, mode, "Error")
        calls = out.makespan_calls
    else:
        raise ValueError(f"unknown mode {mode!r}")
    elapsed_ms = int(round((time.perf_counter() - started) * 1000))
    objective = "" if out.objective is None else format_scaled(out.objective, inst.scale)
    return BenchRecord(
        inst.name, mode, str(out.status), objective, elapsed_ms,
        out.labels_created, out.labels_dominated, out.labels_pruned, calls,
    )


def _run_packed(args):
    return run_one(*args)


def instance_files(directory) -> list[Path]:
    return sorted(p for p in Path(directory).iterdir() if p.is_file() and not p.name.startswith("."))


def run_bench(
    directory,
    mode: str = "makespan",
    time_limit=None,
    memory_mb=None,
    fmt="matrix",
    scale=None,
    workers: int = 1,
    allow_fine_scale: bool = False,
) -> tuple[list[BenchRecord], BenchSummary]:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    jobs = [(p, mode, time_limit, memory_mb, fmt, scale, allow_fine_scale) for p in instance_files(directory)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_packed, jobs))
    else:
        records = [_run_packed(job) for job in jobs]
    records.sort(key=lambda r: (r.instance, r.mode))
    return records, summarize(records)


def summarize(records: Iterable[BenchRecord]) -> BenchSummary:
    records = list(records)
    times = [r.time_ms / 1000 for r in records if r.status in SOLVED]
    if not times:
        return BenchSummary(len(records), 0, None, None)
    return BenchSummary(len(records), len(times), sum(times) / len(times), max(times))


def to_csv(records: Iterable[BenchRecord], with_time: bool = True) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = CSV_HEADER if with_time else [h for h in CSV_HEADER if h != "time_ms"]
    writer.writerow(header)
    for rec in sorted(records, key=lambda r: (r.instance, r.mode)):
        row = rec.row()
        if not with_time:
            del row[4]
        writer.writerow(row)
    return buf.getvalue()
