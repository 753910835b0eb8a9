"""Exact schedulability tests by simulation over a feasibility interval.

For a fixed-priority thread scheduler (global or hierarchical) and for Gang
FTP with constant execution times, a system is feasible iff no process
released in ``[0, S + P)`` misses its deadline, where ``P`` is the
hyperperiod and ``S`` the stabilization point of the priority order. The
simulation runs to ``S + P + max(D)`` so that every such process is resolved.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

from mtsched import _kernel
from mtsched.engine import Miss, check_gang, SimulationResult, simulate_gang, simulate_threads
from mtsched.model import DEFAULT_HYPERPERIOD_BOUND, TaskSystem, hyperperiod
from mtsched.schedulers import (
    Scheduler,
    check_subprogram_order,
    check_task_order,
    flatten_hierarchical,
)


@dataclass(frozen=True)
class AnalysisVerdict:
    feasible: bool
    interval_end: int
    stabilization: tuple[int, ...]
    hyperperiod: int
    first_miss: Optional[Miss] = None
    wcrt: Optional[tuple[int, ...]] = None
    scheduler: str = ""
    assumes_constant_wcet: bool = False
    order: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.feasible == (self.first_miss is not None):
            raise ValueError("a verdict is feasible iff it has no first miss")

    def to_dict(self) -> dict:
        """JSON-ready form with 1-based task/subprogram/job numbers."""
        miss = None
        if self.first_miss is not None:
            i, j, k = self.first_miss.ident
            miss = {
                "task": i + 1,
                "subprogram": None if j is None else j + 1,
                "job": k + 1,
                "instant": self.first_miss.deadline,
            }
        return {
            "scheduler": self.scheduler,
            "feasible": self.feasible,
            "interval": [0, self.interval_end],
            "hyperperiod": self.hyperperiod,
            "stabilization": list(self.stabilization),
            "first_miss": miss,
            "wcrt": None if self.wcrt is None else list(self.wcrt),
            "assumes_constant_wcet": self.assumes_constant_wcet,
            "order": [_label(x) for x in self.order],
        }


def _label(x) -> str:
    if isinstance(x, tuple):
        return ".".join(str(v + 1) for v in x)
    return str(x + 1)


def simulate(system: TaskSystem, scheduler: Scheduler, horizon: int, demand_override=None,
             **kwargs) -> SimulationResult:
    """Dispatch to the thread or Gang engine according to ``scheduler``."""
    if scheduler.gang:
        return simulate_gang(system, scheduler.task_order, horizon, demand_override, **kwargs)
    return simulate_threads(system, scheduler.order, horizon, demand_override, **kwargs)


def feasibility_interval(system: TaskSystem, scheduler: Scheduler,
                         max_hyperperiod: int = DEFAULT_HYPERPERIOD_BOUND):
    """Return ``(stabilization points, P, S + P)``."""
    P = hyperperiod(system, max_hyperperiod)
    points = scheduler.stabilization(system)
    return points, P, points[-1] + P


def analyze(system: TaskSystem, scheduler: Scheduler,
            max_hyperperiod: int = DEFAULT_HYPERPERIOD_BOUND, fast: bool = True) -> AnalysisVerdict:
    """Run the exact test for ``scheduler``.

    ``fast`` uses the compiled kernel; ``fast=False`` runs the reference
    engine. Both give identical verdicts.
    """
    if scheduler.gang:
        check_gang(system)
    points, P, end = feasibility_interval(system, scheduler, max_hyperperiod)
    horizon = end + system.max_deadline
    order = scheduler.task_order if scheduler.gang else scheduler.order
    common = dict(
        interval_end=end,
        stabilization=tuple(points),
        hyperperiod=P,
        scheduler=scheduler.name,
        assumes_constant_wcet=scheduler.gang,
        order=tuple(order),
    )
    if fast:
        out = _kernel.verdict(system, scheduler, horizon, end)
        if out is not None:
            miss, times = out
            if miss is not None:
                return AnalysisVerdict(False, first_miss=Miss(*miss), **common)
            return AnalysisVerdict(True, wcrt=times, **common)
    result = simulate(system, scheduler, horizon,
                      stop_on_miss=True, miss_window=end, record_trace=False)
    for miss in result.misses:
        if _arrival(result, miss.ident) < end:
            return AnalysisVerdict(False, first_miss=miss, **common)
    return AnalysisVerdict(True, wcrt=wcrt(result, system, end), **common)


def _arrival(result: SimulationResult, ident) -> int:
    i, j, k = ident
    return result.jobs[(i, 0 if j is None else j, k)][0]


def fsp_test(system: TaskSystem, order: Sequence[tuple[int, int]],
             max_hyperperiod: int = DEFAULT_HYPERPERIOD_BOUND, fast: bool = True) -> AnalysisVerdict:
    """Exact test for a global fixed-subprogram-priority order (interval ``[0, S*_r + P)``)."""
    order = tuple(tuple(x) for x in order)
    check_subprogram_order(system, order)
    return analyze(system, Scheduler("fsp", False, None, order), max_hyperperiod, fast)


def ftp_fsp_test(system: TaskSystem, task_order: Sequence[int],
                 within: Sequence[Sequence[int]] | None = None,
                 max_hyperperiod: int = DEFAULT_HYPERPERIOD_BOUND, fast: bool = True) -> AnalysisVerdict:
    """Exact test for a hierarchical (FTP, FSP) scheduler (interval ``[0, S_n + P)``)."""
    task_order = tuple(task_order)
    flat = flatten_hierarchical(system, task_order, within)
    return analyze(system, Scheduler("ftp-fsp", False, task_order, flat), max_hyperperiod, fast)


def gang_test(system: TaskSystem, task_order: Sequence[int],
              max_hyperperiod: int = DEFAULT_HYPERPERIOD_BOUND, fast: bool = True) -> AnalysisVerdict:
    """Gang FTP over ``[0, S_n + P)``; exact only for constant execution times."""
    task_order = tuple(task_order)
    check_task_order(system, task_order)
    return analyze(system, Scheduler("gang", True, task_order), max_hyperperiod, fast)


def wcrt(result: SimulationResult, system: TaskSystem, interval_end: int) -> tuple[int, ...]:
    """Per-task worst response time over processes arriving before ``interval_end``.

    A process finishes when its last thread does.
    """
    finish: dict = {}
    for (i, j, k), (arrival, _, _) in result.jobs.items():
        if arrival >= interval_end:
            continue
        done = result.completions[(i, j, k)]
        if done is None:
            raise ValueError(f"job {(i, j, k)} unfinished; WCRT needs a feasible run")
        finish[(i, k)] = max(finish.get((i, k), done), done)
    worst = [0] * system.n
    for (i, k), done in finish.items():
        arrival = system.tasks[i].offset + k * system.tasks[i].period
        worst[i] = max(worst[i], done - arrival)
    return tuple(worst)


@dataclass(frozen=True)
class PeriodicityResult:
    passed: bool
    start: int
    hyperperiod: int
    first_difference: Optional[tuple] = None  # (t, processor, cell in first period, cell in second)


def _shift(cells, shifts):
    return tuple(None if c is None else (c[0], c[1], c[2] - shifts[c[0]]) for c in cells)


def periodicity_probe(system: TaskSystem, scheduler: Scheduler,
                      max_hyperperiod: int = DEFAULT_HYPERPERIOD_BOUND) -> PeriodicityResult:
    """Compare the schedule on ``[S, S+P)`` with ``[S+P, S+2P)`` cell by cell.

    Thread identities of the second period are renumbered back by one
    hyperperiod's worth of jobs before comparing.
    """
    points, P, _ = feasibility_interval(system, scheduler, max_hyperperiod)
    S = points[-1]
    result = simulate(system, scheduler, S + 2 * P)
    if result.misses:
        raise ValueError("periodicity probe needs a feasible system")
    shifts = [P // t.period for t in system.tasks]
    first = result.trace.window(S, S + P)
    second = [(a, b, _shift(c, shifts)) for a, b, c in result.trace.window(S + P, S + 2 * P)]
    if first == second:
        return PeriodicityResult(True, S, P)
    return PeriodicityResult(False, S, P, _first_difference(first, second))


def _first_difference(a: list, b: list):
    """Earliest (t, p, cell_a, cell_b) where two segment lists differ."""
    i = j = 0
    t = 0
    while i < len(a) and j < len(b):
        ca, cb = a[i][2], b[j][2]
        if ca != cb:
            p = next(p for p in range(len(ca)) if ca[p] != cb[p])
            return (t, p, ca[p], cb[p])
        t = min(a[i][1], b[j][1])
        if a[i][1] == t:
            i += 1
        if b[j][1] == t:
            j += 1
    return (t, 0, None, None)


@dataclass(frozen=True)
class Violation:
    """A thread finishing later with reduced demands than with full demands."""

    ident: tuple
    full_completion: int
    reduced_completion: Optional[int]
    trial: int = 0


def completion_violation(full: SimulationResult, reduced: SimulationResult,
                         trial: int = 0) -> Optional[Violation]:
    for ident, done in full.completions.items():
        if done is None:
            continue
        other = reduced.completions.get(ident)
        if other is None or other > done:
            return Violation(ident, done, other, trial)
    return None


def predictability_probe(system: TaskSystem, scheduler: Scheduler, trials: int, seed: int,
                         max_hyperperiod: int = DEFAULT_HYPERPERIOD_BOUND) -> Optional[Violation]:
    """Search for a predictability violation with random demand reductions.

    Each trial draws every job's demand uniformly in ``[0, wcet]`` and
    compares per-thread completions against the full-demand run over the
    feasibility interval.
    """
    _, _, end = feasibility_interval(system, scheduler, max_hyperperiod)
    horizon = end + system.max_deadline
    full = simulate(system, scheduler, horizon, record_trace=False)
    if any(_arrival(full, miss.ident) < end for miss in full.misses):
        raise ValueError("predictability probe needs a system feasible at full wcet")
    rng = random.Random(seed)
    if scheduler.gang:
        keys = sorted({(i, k) for (i, _, k) in full.jobs})
        wcet = {(i, k): system.tasks[i].wcets[0] for i, k in keys}
    else:
        keys = list(full.jobs)
        wcet = {key: system.tasks[key[0]].wcets[key[1]] for key in keys}
    for trial in range(trials):
        demands = {key: rng.randint(0, wcet[key]) for key in keys}
        reduced = simulate(system, scheduler, horizon, demands, record_trace=False)
        found = completion_violation(full, reduced, trial)
        if found is not None:
            return found
    return None
