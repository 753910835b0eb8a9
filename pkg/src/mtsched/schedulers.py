"""Priority assignments as explicit total orders.

A task order is a tuple of task indices, highest priority first. A
subprogram order is a tuple of ``(task, subprogram)`` pairs, highest
priority first. Ties in DM, RM and LSF are broken by ascending index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from mtsched.model import Task, TaskSystem, stabilization_points

TaskOrder = tuple[int, ...]
SubprogramOrder = tuple[tuple[int, int], ...]


def dm_order(system: TaskSystem) -> TaskOrder:
    return tuple(sorted(range(system.n), key=lambda i: (system.tasks[i].deadline, i)))


def rm_order(system: TaskSystem) -> TaskOrder:
    return tuple(sorted(range(system.n), key=lambda i: (system.tasks[i].period, i)))


def im_within_task(task: Task) -> tuple[int, ...]:
    """Index Monotonic: lower subprogram index, higher priority."""
    return tuple(range(task.v))


def im_within(system: TaskSystem) -> tuple[tuple[int, ...], ...]:
    return tuple(im_within_task(t) for t in system.tasks)


def lsf_global(system: TaskSystem) -> SubprogramOrder:
    """Longest Subprogram First over all subprograms of the system."""
    idents = [(i, j) for i, t in enumerate(system.tasks) for j in range(t.v)]
    return tuple(sorted(idents, key=lambda ij: (-system.tasks[ij[0]].wcets[ij[1]], ij)))


def flatten_hierarchical(
    system: TaskSystem,
    task_order: Sequence[int],
    within: Sequence[Sequence[int]] | None = None,
) -> SubprogramOrder:
    """Global subprogram order giving each task a consecutive block of priorities."""
    if within is None:
        within = im_within(system)
    check_task_order(system, task_order)
    check_within(system, within)
    return tuple((i, j) for i in task_order for j in within[i])


def check_task_order(system: TaskSystem, order: Sequence[int]) -> None:
    if sorted(order) != list(range(system.n)):
        raise ValueError(f"task order {tuple(order)} is not a permutation of 0..{system.n - 1}")


def check_within(system: TaskSystem, within: Sequence[Sequence[int]]) -> None:
    if len(within) != system.n:
        raise ValueError("need one subprogram permutation per task")
    for i, perm in enumerate(within):
        if sorted(perm) != list(range(system.tasks[i].v)):
            raise ValueError(f"subprogram order {tuple(perm)} of task {i} is not a permutation")


def check_subprogram_order(system: TaskSystem, order: Sequence[tuple[int, int]]) -> None:
    expected = sorted((i, j) for i, t in enumerate(system.tasks) for j in range(t.v))
    if sorted(tuple(x) for x in order) != expected:
        raise ValueError("subprogram order is not a permutation of the system's subprograms")


@dataclass(frozen=True)
class Scheduler:
    """A concrete priority assignment for one system.

    Thread schedulers carry a global subprogram ``order``; hierarchical ones
    also keep their ``task_order`` (their stabilization point is computed over
    tasks). Gang schedulers carry only ``task_order``.
    """

    name: str
    gang: bool
    task_order: TaskOrder | None = None
    order: SubprogramOrder | None = None

    def stabilization(self, system: TaskSystem) -> list[int]:
        if self.task_order is not None:
            entries = [(system.tasks[i].offset, system.tasks[i].period) for i in self.task_order]
        else:
            entries = [(system.tasks[i].offset, system.tasks[i].period) for i, _ in self.order]
        return stabilization_points(entries)

    def lowest_priority_task(self) -> int:
        if self.task_order is not None:
            return self.task_order[-1]
        return self.order[-1][0]


SCHEDULER_NAMES = ("dm-im", "rm-im", "lsf", "gang-dm", "gang-rm")


def resolve_scheduler(name: str, system: TaskSystem, explicit: str | None = None) -> Scheduler:
    """Build a Scheduler from a CLI-style name or an explicit 1-based order.

    ``explicit`` is a comma list: ``"2,1,3"`` gives a task order (hierarchical
    with IM, or Gang when ``name`` starts with ``gang``); ``"1.1,3.1,1.2"``
    gives a global subprogram order.
    """
    if explicit:
        items = [s.strip() for s in explicit.split(",") if s.strip()]
        if any("." in s for s in items):
            order = tuple((int(a) - 1, int(b) - 1) for a, b in (s.split(".") for s in items))
            check_subprogram_order(system, order)
            return Scheduler("fsp", False, None, order)
        task_order = tuple(int(s) - 1 for s in items)
        check_task_order(system, task_order)
        if name and name.startswith("gang"):
            return Scheduler("gang", True, task_order)
        return Scheduler("ftp-im", False, task_order, flatten_hierarchical(system, task_order))
    if name == "dm-im":
        t = dm_order(system)
        return Scheduler(name, False, t, flatten_hierarchical(system, t))
    if name == "rm-im":
        t = rm_order(system)
        return Scheduler(name, False, t, flatten_hierarchical(system, t))
    if name == "lsf":
        return Scheduler(name, False, None, lsf_global(system))
    if name == "gang-dm":
        return Scheduler(name, True, dm_order(system))
    if name == "gang-rm":
        return Scheduler(name, True, rm_order(system))
    raise ValueError(f"unknown scheduler {name!r}; expected one of {', '.join(SCHEDULER_NAMES)}")
