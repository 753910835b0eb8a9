from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from mtsched.model import (
    FlatSubprogram,
    HyperperiodOverflow,
    Task,
    TaskSystem,
    hyperperiod,
    lcm_bounded,
    stabilization_points,
    task_utilization,
    thread_jobs,
)

from conftest import systems
from oracles import brute_lcm, smallest_arrival_chain


def test_utilization_examples():
    assert task_utilization(Task(0, (2, 2), 12, 12)) == Fraction(1, 3)
    assert task_utilization(Task(0, (7,), 7, 7)) == 1
    assert task_utilization(Task(0, (3, 3), 4, 4)) == Fraction(3, 2)
    assert isinstance(task_utilization(Task(0, (1,), 3, 3)), Fraction)


def test_hyperperiod_examples(ex1):
    assert hyperperiod(ex1) == 12
    assert hyperperiod(TaskSystem((Task(0, (1,), 7, 7),), 1)) == 7
    s = TaskSystem(tuple(Task(0, (1,), t, t) for t in (4, 5, 10)), 1)
    assert hyperperiod(s) == brute_lcm([4, 5, 10]) == 20


def test_hyperperiod_overflow():
    primes = [1_000_003, 1_000_033, 1_000_037]
    s = TaskSystem(tuple(Task(0, (1,), p, p) for p in primes), 1)
    with pytest.raises(HyperperiodOverflow):
        hyperperiod(s, bound=5_000_000)
    with pytest.raises(HyperperiodOverflow):
        lcm_bounded([2**40 + 15, 2**40 + 21, 2**40 + 27])
    assert hyperperiod(s) == primes[0] * primes[1] * primes[2]


@pytest.mark.parametrize(
    "entries, expected",
    [
        ([(0, 3), (0, 4), (0, 12)], [0, 0, 0]),
        ([(0, 4), (5, 7)], [0, 5]),
        ([(3, 5), (0, 4)], [3, 4]),
    ],
)
def test_stabilization_examples(entries, expected):
    assert stabilization_points(entries) == expected == smallest_arrival_chain(entries)


entry_lists = st.lists(st.tuples(st.integers(0, 60), st.integers(1, 40)), min_size=1, max_size=8)


@given(entry_lists)
def test_stabilization_matches_enumeration(entries):
    assert stabilization_points(entries) == smallest_arrival_chain(entries)


@given(entry_lists)
def test_stabilization_monotone(entries):
    s = stabilization_points(entries)
    for i in range(1, len(entries)):
        o, t = entries[i]
        assert s[i - 1] <= s[i] < s[i - 1] + t or s[i] == o
        assert s[i] >= o and (s[i] - o) % t == 0


@given(systems())
def test_hyperperiod_divisible(system):
    P = hyperperiod(system)
    assert all(P % t.period == 0 for t in system.tasks)


@given(st.lists(st.integers(1, 9), min_size=1, max_size=5), st.randoms(use_true_random=False))
def test_utilization_permutation_invariant(wcets, rnd):
    a = Task(0, tuple(wcets), 9, 9)
    shuffled = list(wcets)
    rnd.shuffle(shuffled)
    assert task_utilization(a) == task_utilization(Task(0, tuple(shuffled), 9, 9))


def test_thread_jobs_examples():
    jobs = thread_jobs(FlatSubprogram(2, 0, 0, 2, 12, 12), 12)
    assert [(j.arrival, j.deadline, j.demand) for j in jobs] == [(0, 12, 2)]
    assert thread_jobs(FlatSubprogram(0, 0, 3, 1, 4, 4), 0) == []
    assert [j.arrival for j in thread_jobs(FlatSubprogram(0, 0, 1, 1, 5, 5), 11)] == [1, 6]


@given(st.integers(0, 30), st.integers(1, 10), st.integers(0, 80))
def test_thread_jobs_arrival_set(offset, period, end):
    jobs = thread_jobs(FlatSubprogram(0, 0, offset, 1, period, period), end)
    assert [j.arrival for j in jobs] == [a for a in range(end) if a >= offset and (a - offset) % period == 0]
    assert [j.k for j in jobs] == list(range(len(jobs)))


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(offset=0, wcets=(), deadline=3, period=3),
        dict(offset=0, wcets=(4,), deadline=3, period=5),
        dict(offset=0, wcets=(1,), deadline=6, period=5),
        dict(offset=-1, wcets=(1,), deadline=3, period=3),
        dict(offset=0, wcets=(0,), deadline=3, period=3),
        dict(offset=0, wcets=(1,), deadline=2.5, period=3),
    ],
)
def test_task_rejects_invalid(kwargs):
    with pytest.raises((ValueError, TypeError)):
        Task(**kwargs)


def test_system_rejects_invalid():
    with pytest.raises(ValueError):
        TaskSystem((), 2)
    with pytest.raises(ValueError):
        TaskSystem((Task(0, (1,), 2, 2),), 0)


def test_flat_subprograms(ex1):
    flat = ex1.flat_subprograms()
    assert len(flat) == ex1.r == 4
    assert flat[3] == FlatSubprogram(2, 1, 0, 2, 12, 12)
