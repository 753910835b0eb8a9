"""Multi-phase multi-thread tasks and their non-predictability.

A multi-phase task is a sequence of phases; each phase is a set of threads
that may run in parallel, and phase ``j+1`` is released only when every
thread of phase ``j`` has completed. Scheduling is hierarchical: task
priority first, then thread index inside the phase.

The simulator here steps one time unit at a time and shares no code with
:mod:`mtsched.engine`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from mtsched.analysis import Violation, completion_violation
from mtsched.engine import Miss, ScheduleTrace, SimulationResult


@dataclass(frozen=True)
class MultiPhaseTask:
    """``phases[j]`` holds the wcets of phase ``j``'s threads.

    ``period=None`` releases a single process; ``deadline=None`` disables
    deadline checks.
    """

    offset: int
    phases: tuple[tuple[int, ...], ...]
    deadline: Optional[int] = None
    period: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "phases", tuple(tuple(p) for p in self.phases))
        if self.offset < 0:
            raise ValueError("offset must be non-negative")
        if not self.phases:
            raise ValueError("a multi-phase task needs at least one phase")
        for phase in self.phases:
            if not phase or min(phase) < 1:
                raise ValueError("every phase needs at least one thread with wcet >= 1")
        if self.period is not None and self.period < 1:
            raise ValueError("period must be positive")
        if self.deadline is not None and self.period is not None and self.deadline > self.period:
            raise ValueError("constrained deadlines only")


class _Process:
    def __init__(self, task: int, k: int, arrival: int, demands: list[list[int]],
                 deadline: Optional[int]):
        self.task = task
        self.k = k
        self.arrival = arrival
        self.remaining = demands
        self.deadline = deadline
        self.phase = 0


def simulate_multiphase(
    tasks: Sequence[MultiPhaseTask],
    task_order: Sequence[int],
    m: int,
    horizon: int,
    demand_override: Mapping | None = None,
) -> SimulationResult:
    """Unit-step simulation over ``[0, horizon)``.

    Thread identities are ``(task, phase, thread, job)``; ``demand_override``
    maps them to demands in ``[0, wcet]``.
    """
    if sorted(task_order) != list(range(len(tasks))):
        raise ValueError("task order must be a permutation of the task indices")
    if m < 1 or horizon < 0:
        raise ValueError("need m >= 1 and horizon >= 0")
    rank = {i: r for r, i in enumerate(task_order)}
    override = demand_override or {}
    trace = ScheduleTrace(horizon, m)
    jobs: dict = {}
    completions: dict = {}
    misses: list = []
    procs: list[_Process] = []

    def start_phases(t):
        for p in procs:
            while p.phase < len(p.remaining) and not any(p.remaining[p.phase]):
                p.phase += 1
                if p.phase < len(p.remaining):
                    for x, d in enumerate(p.remaining[p.phase]):
                        if d == 0:
                            completions[(p.task, p.phase, x, p.k)] = t

    def check_deadlines(t):
        for p in procs:
            if p.deadline == t:
                for ph, rem in enumerate(p.remaining):
                    for x, d in enumerate(rem):
                        if d > 0:
                            misses.append(Miss((p.task, ph, x, p.k), t))

    for t in range(horizon):
        for i, task in enumerate(tasks):
            if t < task.offset:
                continue
            if task.period is None:
                if t != task.offset:
                    continue
                k = 0
            elif (t - task.offset) % task.period:
                continue
            else:
                k = (t - task.offset) // task.period
            dl = None if task.deadline is None else t + task.deadline
            demands = []
            for ph, phase in enumerate(task.phases):
                row = []
                for x, wcet in enumerate(phase):
                    ident = (i, ph, x, k)
                    d = override.get(ident, wcet)
                    if not 0 <= d <= wcet:
                        raise ValueError(f"demand {d} of {ident} outside [0, {wcet}]")
                    jobs[ident] = (t, dl, d)
                    completions[ident] = t if (d == 0 and ph == 0) else None
                    row.append(d)
                demands.append(row)
            procs.append(_Process(i, k, t, demands, dl))
        start_phases(t)
        check_deadlines(t)

        ready = [
            (rank[p.task], p.k, x, p)
            for p in procs
            if p.phase < len(p.remaining)
            for x, d in enumerate(p.remaining[p.phase])
            if d > 0
        ]
        ready.sort(key=lambda e: e[:3])
        running = ready[:m]
        cells = tuple((p.task, p.phase, x, p.k) for _, _, x, p in running)
        trace._append(t, t + 1, cells + (None,) * (m - len(cells)))
        for _, _, x, p in running:
            p.remaining[p.phase][x] -= 1
            if p.remaining[p.phase][x] == 0:
                completions[(p.task, p.phase, x, p.k)] = t + 1
        procs = [p for p in procs if p.phase < len(p.remaining)]

    start_phases(horizon)
    check_deadlines(horizon)
    return SimulationResult(trace, jobs, completions, misses, horizon)


#: The two-task fixture: tau_1 = (0, {2}, {2,2,2}) > tau_2 = (1, {1}) on three
#: processors. Deadlines and periods are set far out of the way.
DEMO_TASKS = (
    MultiPhaseTask(0, ((2,), (2, 2, 2)), 100, 100),
    MultiPhaseTask(1, ((1,),), 100, 100),
)
DEMO_ORDER = (0, 1)
DEMO_M = 3
DEMO_HORIZON = 10
DEMO_WATCHED = (1, 0, 0, 0)  # the single thread of tau_2
DEMO_REDUCTION = {(0, 0, 0, 0): 1}  # first phase of tau_1 shortened by one unit


@dataclass
class DemoReport:
    full_completion: int
    reduced_completion: int
    full: SimulationResult
    reduced: SimulationResult

    @property
    def violated(self) -> bool:
        return self.reduced_completion > self.full_completion

    def to_dict(self) -> dict:
        def rows(res):
            return [
                ["-" if c is None else ".".join(str(v + 1) for v in c) for c in cells]
                for _, cells in res.trace.rows()
            ]

        return {
            "watched_thread": "tau_2",
            "full": self.full_completion,
            "reduced": self.reduced_completion,
            "violated": self.violated,
            "full_trace": rows(self.full),
            "reduced_trace": rows(self.reduced),
        }


def unpredictability_demo(reduction: Mapping | None = None) -> DemoReport:
    """Run the fixture at full demand and with ``reduction`` applied.

    The default reduction shortens tau_1's first phase from 2 to 1, which
    delays tau_2 from 2 to 4.
    """
    if reduction is None:
        reduction = DEMO_REDUCTION
    full = simulate_multiphase(DEMO_TASKS, DEMO_ORDER, DEMO_M, DEMO_HORIZON)
    reduced = simulate_multiphase(DEMO_TASKS, DEMO_ORDER, DEMO_M, DEMO_HORIZON, reduction)
    return DemoReport(
        full.completions[DEMO_WATCHED], reduced.completions[DEMO_WATCHED], full, reduced
    )


def predictability_probe(
    tasks: Sequence[MultiPhaseTask],
    task_order: Sequence[int],
    m: int,
    horizon: int,
    trials: int,
    seed: int,
) -> Optional[Violation]:
    """Random demand reductions looking for a thread that finishes later."""
    full = simulate_multiphase(tasks, task_order, m, horizon)
    rng = random.Random(seed)
    for trial in range(trials):
        demands = {
            ident: rng.randint(0, tasks[ident[0]].phases[ident[1]][ident[2]])
            for ident in full.jobs
        }
        reduced = simulate_multiphase(tasks, task_order, m, horizon, demands)
        found = completion_violation(full, reduced, trial)
        if found is not None:
            return found
    return None
