"""Deterministic preemptive simulation of thread scheduling and Gang scheduling.

Time is integral. The engines are event driven: they jump between arrivals,
completions and deadlines, and the schedule between two events is constant,
so the recorded segments expand to exactly the per-unit schedule.

Processor assignment follows "higher priority, lower processor index"; idle
processors are the highest-indexed ones. A job that misses its deadline keeps
executing; the miss is only recorded.
"""

from __future__ import annotations

import heapq
from bisect import bisect_right, insort
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Sequence

from mtsched.model import MAX_REPRESENTABLE, TaskSystem
from mtsched.schedulers import check_subprogram_order, check_task_order

ThreadId = tuple  # (task, subprogram, job) -- subprogram is None for a whole Gang process
Cells = tuple  # one ThreadId or None (idle) per processor

IDLE = None


@dataclass(frozen=True)
class Miss:
    ident: ThreadId
    deadline: int

    @property
    def task(self) -> int:
        return self.ident[0]


@dataclass
class ScheduleTrace:
    """Run-length encoded schedule: ``segments`` of ``(start, end, cells)``.

    Adjacent segments always differ in their cells.
    """

    horizon: int
    processors: int
    segments: list = field(default_factory=list)

    def _append(self, start: int, end: int, cells: Cells) -> None:
        segs = self.segments
        if segs and segs[-1][1] == start and segs[-1][2] == cells:
            segs[-1] = (segs[-1][0], end, cells)
        else:
            segs.append((start, end, cells))

    def cells_at(self, t: int) -> Cells:
        if not 0 <= t < self.horizon:
            raise IndexError(f"instant {t} outside [0, {self.horizon})")
        i = bisect_right([s[0] for s in self.segments], t) - 1
        start, end, cells = self.segments[i]
        return cells

    def cell(self, t: int, p: int) -> Optional[ThreadId]:
        return self.cells_at(t)[p]

    def rows(self) -> Iterator[tuple[int, Cells]]:
        """One ``(t, cells)`` row per instant in ``[0, horizon)``."""
        for start, end, cells in self.segments:
            for t in range(start, end):
                yield t, cells

    def window(self, start: int, end: int) -> list:
        """Segments clipped to ``[start, end)`` with times relative to ``start``."""
        out: list = []
        for s, e, cells in self.segments:
            if e <= start or s >= end:
                continue
            lo, hi = max(s, start) - start, min(e, end) - start
            if out and out[-1][1] == lo and out[-1][2] == cells:
                out[-1] = (out[-1][0], hi, cells)
            else:
                out.append((lo, hi, cells))
        return out

    def executed(self) -> dict:
        """Units executed per thread identity over the whole trace."""
        totals: dict = {}
        for s, e, cells in self.segments:
            for c in cells:
                if c is not None:
                    totals[c] = totals.get(c, 0) + (e - s)
        return totals


@dataclass
class SimulationResult:
    """Outcome of one simulation run.

    ``jobs`` maps every thread released before the run ended to
    ``(arrival, absolute_deadline, demand)``; ``completions`` maps it to its
    completion instant, or None if unfinished when the run ended.
    """

    trace: ScheduleTrace
    jobs: dict
    completions: dict
    misses: list
    end: int

    @property
    def first_miss(self) -> Optional[Miss]:
        return self.misses[0] if self.misses else None


def _check_horizon(horizon: int) -> None:
    if not isinstance(horizon, int) or horizon < 0:
        raise ValueError(f"horizon must be a non-negative integer, got {horizon!r}")
    if horizon > MAX_REPRESENTABLE:
        raise OverflowError(f"horizon {horizon} exceeds the representable range")


def _demand(override, key, wcet: int) -> int:
    if override is None:
        return wcet
    d = override.get(key, wcet)
    if not 0 <= d <= wcet:
        raise ValueError(f"demand {d} of {key} outside [0, {wcet}]")
    return d


def simulate_threads(
    system: TaskSystem,
    order: Sequence[tuple[int, int]],
    horizon: int,
    demand_override: Mapping | None = None,
    *,
    stop_on_miss: bool = False,
    miss_window: int | None = None,
    record_trace: bool = True,
) -> SimulationResult:
    """Global fixed-subprogram-priority thread scheduling over ``[0, horizon)``.

    ``order`` lists every ``(task, subprogram)`` once, highest priority first.
    Among threads of one subprogram the earlier job wins. ``demand_override``
    maps ``(task, subprogram, job)`` to a demand in ``[0, wcet]``.

    With ``stop_on_miss`` the run ends at the first miss of a job arriving
    before ``miss_window`` (default: any job).
    """
    _check_horizon(horizon)
    check_subprogram_order(system, order)
    m = system.processors
    window = horizon if miss_window is None else miss_window
    entries = [system.flat(tuple(ij)) for ij in order]

    arrivals = [(e.offset, rank) for rank, e in enumerate(entries) if e.offset < horizon]
    heapq.heapify(arrivals)
    next_k = [0] * len(entries)
    active: list = []  # [rank, k, remaining, ident, deadline, arrival], kept sorted
    deadlines: list = []  # (deadline, rank, k, job)
    trace = ScheduleTrace(horizon, m)
    jobs: dict = {}
    completions: dict = {}
    misses: list = []
    idle = (None,) * m

    t = 0
    while True:
        while arrivals and arrivals[0][0] == t:
            _, rank = heapq.heappop(arrivals)
            e = entries[rank]
            k = next_k[rank]
            next_k[rank] = k + 1
            if t + e.period < horizon:
                heapq.heappush(arrivals, (t + e.period, rank))
            ident = (e.source_task, e.source_index, k)
            d = _demand(demand_override, ident, e.wcet)
            dl = t + e.deadline
            jobs[ident] = (t, dl, d)
            if d == 0:
                completions[ident] = t
                continue
            completions[ident] = None
            job = [rank, k, d, ident, dl, t]
            insort(active, job)
            heapq.heappush(deadlines, (dl, rank, k, job))

        stop = False
        while deadlines and deadlines[0][0] <= t:
            dl, _, _, job = heapq.heappop(deadlines)
            if job[2] > 0:
                misses.append(Miss(job[3], dl))
                if stop_on_miss and job[5] < window:
                    stop = True
        if stop or t >= horizon:
            break

        while deadlines and deadlines[0][3][2] == 0:
            heapq.heappop(deadlines)
        running = active[:m]
        nt = horizon
        if arrivals and arrivals[0][0] < nt:
            nt = arrivals[0][0]
        if deadlines and deadlines[0][0] < nt:
            nt = deadlines[0][0]
        for job in running:
            if t + job[2] < nt:
                nt = t + job[2]

        if record_trace:
            if running:
                cells = tuple(job[3] for job in running)
                if len(cells) < m:
                    cells += idle[len(cells):]
            else:
                cells = idle
            trace._append(t, nt, cells)

        dt = nt - t
        finished = False
        for job in running:
            job[2] -= dt
            if job[2] == 0:
                completions[job[3]] = nt
                finished = True
        if finished:
            active = [job for job in active if job[2] > 0]
        t = nt

    trace.horizon = t
    return SimulationResult(trace, jobs, completions, misses, t)


def check_gang(system: TaskSystem) -> None:
    """Gang needs ``v_i <= m`` and equal wcets within every task."""
    m = system.processors
    for i, task in enumerate(system.tasks):
        if task.v > m:
            raise ValueError(f"task {i} needs {task.v} processors, platform has {m}")
        if len(set(task.wcets)) != 1:
            raise ValueError(f"Gang scheduling needs equal subprogram wcets (task {i})")


def simulate_gang(
    system: TaskSystem,
    order: Sequence[int],
    horizon: int,
    demand_override: Mapping | None = None,
    *,
    stop_on_miss: bool = False,
    miss_window: int | None = None,
    record_trace: bool = True,
) -> SimulationResult:
    """Gang fixed-task-priority scheduling over ``[0, horizon)``.

    A process of task ``i`` runs on exactly ``v_i`` processors at once or not
    at all. Tasks are scanned by decreasing priority and an active one is
    dispatched iff ``v_i`` processors are still free, taking the lowest-index
    free ones. ``demand_override`` maps ``(task, job)`` to a demand.

    Miss identities carry ``None`` as subprogram; per-thread ``jobs`` and
    ``completions`` use ``(task, j, job)`` for each thread ``j`` of the gang.
    """
    _check_horizon(horizon)
    check_task_order(system, order)
    check_gang(system)
    m = system.processors
    window = horizon if miss_window is None else miss_window
    tasks = [system.tasks[i] for i in order]

    arrivals = [(t.offset, rank) for rank, t in enumerate(tasks) if t.offset < horizon]
    heapq.heapify(arrivals)
    next_k = [0] * len(tasks)
    active: list = []  # [rank, k, remaining, task_index, deadline, arrival, v]
    deadlines: list = []
    trace = ScheduleTrace(horizon, m)
    jobs: dict = {}
    completions: dict = {}
    misses: list = []
    idle = (None,) * m

    t = 0
    while True:
        while arrivals and arrivals[0][0] == t:
            _, rank = heapq.heappop(arrivals)
            task = tasks[rank]
            i = order[rank]
            k = next_k[rank]
            next_k[rank] = k + 1
            if t + task.period < horizon:
                heapq.heappush(arrivals, (t + task.period, rank))
            d = _demand(demand_override, (i, k), task.wcets[0])
            dl = t + task.deadline
            for j in range(task.v):
                jobs[(i, j, k)] = (t, dl, d)
                completions[(i, j, k)] = t if d == 0 else None
            if d == 0:
                continue
            job = [rank, k, d, i, dl, t, task.v]
            insort(active, job)
            heapq.heappush(deadlines, (dl, rank, k, job))

        stop = False
        while deadlines and deadlines[0][0] <= t:
            dl, _, _, job = heapq.heappop(deadlines)
            if job[2] > 0:
                misses.append(Miss((job[3], None, job[1]), dl))
                if stop_on_miss and job[5] < window:
                    stop = True
        if stop or t >= horizon:
            break

        while deadlines and deadlines[0][3][2] == 0:
            heapq.heappop(deadlines)
        free = m
        running = []
        for job in active:
            if job[6] <= free:
                running.append(job)
                free -= job[6]
                if free == 0:
                    break
        nt = horizon
        if arrivals and arrivals[0][0] < nt:
            nt = arrivals[0][0]
        if deadlines and deadlines[0][0] < nt:
            nt = deadlines[0][0]
        for job in running:
            if t + job[2] < nt:
                nt = t + job[2]

        if record_trace:
            cells = tuple((job[3], j, job[1]) for job in running for j in range(job[6]))
            if free:
                cells += idle[:free]
            trace._append(t, nt, cells)

        dt = nt - t
        finished = False
        for job in running:
            job[2] -= dt
            if job[2] == 0:
                for j in range(job[6]):
                    completions[(job[3], j, job[1])] = nt
                finished = True
        if finished:
            active = [job for job in active if job[2] > 0]
        t = nt

    trace.horizon = t
    return SimulationResult(trace, jobs, completions, misses, t)
