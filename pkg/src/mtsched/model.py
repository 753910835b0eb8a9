"""Static task-system representation and derived quantities.

All indices (task, subprogram, process) are 0-based in this package; the
CLI renders them 1-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

#: Largest hyperperiod considered representable (signed 64-bit range).
MAX_REPRESENTABLE = 2**63 - 1

#: Default bound above which analysis entry points refuse a system.
DEFAULT_HYPERPERIOD_BOUND = 5_000_000


class HyperperiodOverflow(ArithmeticError):
    """The lcm of the periods leaves the representable (or allowed) range."""


@dataclass(frozen=True)
class Subprogram:
    wcet: int

    def __post_init__(self):
        if not isinstance(self.wcet, int) or self.wcet < 1:
            raise ValueError(f"subprogram wcet must be a positive integer, got {self.wcet!r}")


@dataclass(frozen=True)
class Task:
    """Periodic multi-thread task ``(offset, {C^1..C^v}, deadline, period)``.

    Subprogram order in ``wcets`` is the index order used by Index Monotonic.
    """

    offset: int
    wcets: tuple[int, ...]
    deadline: int
    period: int

    def __post_init__(self):
        object.__setattr__(self, "wcets", tuple(self.wcets))
        for name in ("offset", "deadline", "period"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool):
                raise TypeError(f"{name} must be an integer, got {value!r}")
        if self.offset < 0:
            raise ValueError(f"offset must be non-negative, got {self.offset}")
        if not self.wcets:
            raise ValueError("a task needs at least one subprogram")
        for c in self.wcets:
            Subprogram(c)
        if self.period < 1 or self.deadline < 1:
            raise ValueError("deadline and period must be positive")
        if self.deadline > self.period:
            raise ValueError(f"constrained deadlines only: D={self.deadline} > T={self.period}")
        if max(self.wcets) > self.deadline:
            raise ValueError(
                f"subprogram wcet {max(self.wcets)} exceeds deadline {self.deadline}"
            )

    @property
    def subprograms(self) -> tuple[Subprogram, ...]:
        return tuple(Subprogram(c) for c in self.wcets)

    @property
    def v(self) -> int:
        """Number of subprograms (degree of parallelism)."""
        return len(self.wcets)

    @property
    def utilization(self) -> Fraction:
        return task_utilization(self)


@dataclass(frozen=True)
class TaskSystem:
    tasks: tuple[Task, ...]
    processors: int

    def __post_init__(self):
        object.__setattr__(self, "tasks", tuple(self.tasks))
        if not self.tasks:
            raise ValueError("a task system needs at least one task")
        if not isinstance(self.processors, int) or self.processors < 1:
            raise ValueError(f"processors must be a positive integer, got {self.processors!r}")

    @property
    def n(self) -> int:
        return len(self.tasks)

    @property
    def m(self) -> int:
        return self.processors

    @property
    def r(self) -> int:
        """Total number of subprograms."""
        return sum(t.v for t in self.tasks)

    @property
    def utilization(self) -> Fraction:
        return sum((task_utilization(t) for t in self.tasks), Fraction(0))

    @property
    def max_deadline(self) -> int:
        return max(t.deadline for t in self.tasks)

    def hyperperiod(self, bound: int | None = None) -> int:
        return hyperperiod(self, bound)

    def flat_subprograms(self) -> list[FlatSubprogram]:
        """Every subprogram of the system, in (task, subprogram) index order."""
        return [
            FlatSubprogram(i, j, t.offset, c, t.deadline, t.period)
            for i, t in enumerate(self.tasks)
            for j, c in enumerate(t.wcets)
        ]

    def flat(self, ident: tuple[int, int]) -> FlatSubprogram:
        i, j = ident
        t = self.tasks[i]
        return FlatSubprogram(i, j, t.offset, t.wcets[j], t.deadline, t.period)


@dataclass(frozen=True)
class FlatSubprogram:
    source_task: int
    source_index: int
    offset: int
    wcet: int
    deadline: int
    period: int

    @property
    def ident(self) -> tuple[int, int]:
        return (self.source_task, self.source_index)


@dataclass(frozen=True)
class ThreadJob:
    """One thread: job ``k`` of subprogram ``sub`` of task ``task``."""

    task: int
    sub: int
    k: int
    arrival: int
    demand: int
    deadline: int

    @property
    def ident(self) -> tuple[int, int, int]:
        return (self.task, self.sub, self.k)


def task_utilization(task: Task) -> Fraction:
    return Fraction(sum(task.wcets), task.period)


def lcm_bounded(values: Iterable[int], bound: int = MAX_REPRESENTABLE) -> int:
    result = 1
    for v in values:
        result = result * v // math.gcd(result, v)
        if result > bound:
            raise HyperperiodOverflow(f"lcm exceeds {bound}")
    return result


def hyperperiod(system: TaskSystem, bound: int | None = None) -> int:
    """lcm of the periods. Raises HyperperiodOverflow past ``bound``."""
    limit = MAX_REPRESENTABLE if bound is None else min(bound, MAX_REPRESENTABLE)
    return lcm_bounded((t.period for t in system.tasks), limit)


def stabilization_points(entries: Sequence[tuple[int, int]]) -> list[int]:
    """Stabilization instants for (offset, period) pairs in decreasing priority.

    ``S_1 = O_1`` and ``S_i`` is the first arrival of entry ``i`` at or after
    ``S_{i-1}`` (never before its own offset).
    """
    points: list[int] = []
    for offset, period in entries:
        if not points:
            points.append(offset)
            continue
        prev = points[-1]
        # -((O - S) // T) is the exact ceiling of (S - O) / T, negative values included
        k = -((offset - prev) // period)
        points.append(max(offset, offset + k * period))
    return points


def thread_jobs(entry: FlatSubprogram, window_end: int) -> list[ThreadJob]:
    """All jobs of ``entry`` arriving strictly before ``window_end``, at full wcet."""
    jobs = []
    k = 0
    arrival = entry.offset
    while arrival < window_end:
        jobs.append(
            ThreadJob(entry.source_task, entry.source_index, k, arrival, entry.wcet,
                      arrival + entry.deadline)
        )
        k += 1
        arrival += entry.period
    return jobs
