"""Batch comparison of (DM, IM) thread scheduling against Gang DM."""

from __future__ import annotations

import csv
import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from mtsched.analysis import ftp_fsp_test, gang_test
from mtsched.schedulers import dm_order
from mtsched.taskgen import GenConfig, generate_system

BUCKETS_PER_M = 20
WCRT_WINDOW = (Fraction(1, 4), Fraction(9, 10))


@dataclass(frozen=True)
class ExperimentRecord:
    system_id: int
    seed: int
    m: int
    distribution: str
    utilization: Fraction
    n: int
    hyperperiod: int
    thread_feasible: bool
    gang_feasible: bool
    thread_miss: Optional[int] = None
    gang_miss: Optional[int] = None
    thread_wcrt: Optional[int] = None
    gang_wcrt: Optional[int] = None

    @property
    def both(self) -> bool:
        return self.thread_feasible and self.gang_feasible

    @property
    def bucket(self) -> int:
        return math.floor(self.utilization * BUCKETS_PER_M / self.m)

    def row(self) -> dict:
        u = self.utilization
        return {
            "system_id": self.system_id,
            "seed": self.seed,
            "m": self.m,
            "distribution": self.distribution,
            "u_num": u.numerator,
            "u_den": u.denominator,
            "utilization": f"{float(u):.6f}",
            "n": self.n,
            "hyperperiod": self.hyperperiod,
            "dm_im_feasible": int(self.thread_feasible),
            "gang_dm_feasible": int(self.gang_feasible),
            "dm_im_first_miss": "" if self.thread_miss is None else self.thread_miss,
            "gang_dm_first_miss": "" if self.gang_miss is None else self.gang_miss,
            "dm_im_wcrt_lowest": "" if self.thread_wcrt is None else self.thread_wcrt,
            "gang_dm_wcrt_lowest": "" if self.gang_wcrt is None else self.gang_wcrt,
        }


def system_seed(seed: int, m: int, distribution: str, index: int) -> int:
    digest = hashlib.sha256(f"{seed}:{m}:{distribution}:{index}".encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def evaluate(job: tuple) -> ExperimentRecord:
    system_id, seed, m, dist = job
    system = generate_system(GenConfig(m, dist, seed=seed))
    order = dm_order(system)
    thread = ftp_fsp_test(system, order)
    gang = gang_test(system, order)
    lowest = order[-1]
    both = thread.feasible and gang.feasible
    return ExperimentRecord(
        system_id, seed, m, dist, system.utilization, system.n, thread.hyperperiod,
        thread.feasible, gang.feasible,
        None if thread.feasible else thread.first_miss.deadline,
        None if gang.feasible else gang.first_miss.deadline,
        thread.wcrt[lowest] if both else None,
        gang.wcrt[lowest] if both else None,
    )


def plan(counts: Mapping[tuple[int, str], int], seed: int) -> list[tuple]:
    """Job list, one entry per system, in system-id order."""
    jobs = []
    for (m, dist), count in counts.items():
        for i in range(count):
            jobs.append((len(jobs), system_seed(seed, m, dist, i), m, dist))
    return jobs


def run_experiment(counts: Mapping[tuple[int, str], int], seed: int,
                   workers: int = 1) -> list[ExperimentRecord]:
    """Generate and analyze ``counts[(m, distribution)]`` systems per cell."""
    jobs = plan(counts, seed)
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            records = list(pool.map(evaluate, jobs, chunksize=16))
    else:
        records = [evaluate(j) for j in jobs]
    return sorted(records, key=lambda r: r.system_id)


def success_table(records: Iterable[ExperimentRecord]) -> list[dict]:
    """Success ratios per platform size and utilization bucket of width m/20."""
    cells: dict = {}
    for r in records:
        c = cells.setdefault((r.m, r.bucket), [0, 0, 0, 0])
        c[0] += 1
        c[1] += r.thread_feasible
        c[2] += r.gang_feasible
        c[3] += r.both
    rows = []
    for (m, b), (total, thread, gang, both) in sorted(cells.items()):
        width = Fraction(m, BUCKETS_PER_M)
        rows.append({
            "m": m,
            "u_low": f"{float(b * width):.2f}",
            "u_high": f"{float((b + 1) * width):.2f}",
            "systems": total,
            "dm_im": thread / total,
            "gang_dm": gang / total,
            "both": both / total,
        })
    return rows


def wcrt_table(records: Iterable[ExperimentRecord]) -> list[dict]:
    """Strict WCRT wins of the lowest-priority task among systems feasible under both.

    Only systems with utilization strictly between 25% and 90% of m count.
    """
    cells: dict = {}
    lo, hi = WCRT_WINDOW
    for r in records:
        if not r.both or not lo * r.m < r.utilization < hi * r.m:
            continue
        c = cells.setdefault((r.m, r.bucket), [0, 0, 0])
        c[0] += 1
        if r.thread_wcrt < r.gang_wcrt:
            c[1] += 1
        elif r.gang_wcrt < r.thread_wcrt:
            c[2] += 1
    rows = []
    for (m, b), (total, thread, gang) in sorted(cells.items()):
        width = Fraction(m, BUCKETS_PER_M)
        rows.append({
            "m": m,
            "u_low": f"{float(b * width):.2f}",
            "u_high": f"{float((b + 1) * width):.2f}",
            "both_feasible": total,
            "dm_im_wins": thread,
            "gang_dm_wins": gang,
            "ties": total - thread - gang,
        })
    return rows


def write_csv(rows: list[dict], path, fieldnames: list[str] | None = None) -> None:
    if fieldnames is None:
        fieldnames = list(rows[0]) if rows else []
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (f"{v:.6f}" if isinstance(v, float) else v) for k, v in row.items()})


RECORD_FIELDS = list(ExperimentRecord(0, 0, 1, "", Fraction(0), 0, 0, True, True).row())
