"""Random task-system generation for the Gang vs. multi-thread study.

Each task: period uniform on the period range, offset uniform on ``[1, T]``,
utilization from one of five distributions, parallelism ``v`` uniform on
``[1, m]``, equal subprogram wcets ``round(u*T/v)`` and a deadline uniform on
``[C, T]``. Tasks are added until the next one would push the total
utilization above ``m``; that task is discarded.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from mtsched.model import DEFAULT_HYPERPERIOD_BOUND, Task, TaskSystem

DISTRIBUTIONS = ("uniform", "bimodal", "exp25", "exp50", "exp75")

#: Mean of each exponential distribution as a fraction of m.
EXP_MEANS = {"exp25": 0.25, "exp50": 0.5, "exp75": 0.75}

HEAVY_PROBABILITY = 1 / 3
MAX_REDRAWS = 100


@dataclass(frozen=True)
class GenConfig:
    m: int
    distribution: str = "uniform"
    period_range: tuple[int, int] = (1, 250)
    hyperperiod_bound: int = DEFAULT_HYPERPERIOD_BOUND
    seed: int = 0

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be at least 1")
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"unknown distribution {self.distribution!r}")
        lo, hi = self.period_range
        if not 1 <= lo <= hi:
            raise ValueError(f"bad period range {self.period_range}")
        if self.hyperperiod_bound < hi:
            raise ValueError("hyperperiod bound below the largest period")


def raw_utilization(cfg: GenConfig, period: int, rng: random.Random) -> float:
    """One draw from the configured distribution, before truncation."""
    m = cfg.m
    low = 1 / period
    if cfg.distribution == "uniform":
        return rng.uniform(low, m)
    if cfg.distribution == "bimodal":
        if rng.random() < HEAVY_PROBABILITY:
            return rng.uniform(m / 2, m)
        return rng.uniform(low, m / 2)
    return rng.expovariate(1 / (EXP_MEANS[cfg.distribution] * m))


def draw_utilization(cfg: GenConfig, period: int, rng: random.Random) -> float:
    """Utilization truncated to ``[1/T, m]`` by redrawing, uniform as a last resort."""
    low = 1 / period
    for _ in range(MAX_REDRAWS):
        u = raw_utilization(cfg, period, rng)
        if low <= u <= cfg.m:
            return u
    return rng.uniform(low, cfg.m)


def draw_period(cfg: GenConfig, current_lcm: int, rng: random.Random) -> int:
    """Uniform period, conditioned on keeping the running lcm within bound."""
    lo, hi = cfg.period_range
    for _ in range(MAX_REDRAWS):
        t = rng.randint(lo, hi)
        if current_lcm * t // math.gcd(current_lcm, t) <= cfg.hyperperiod_bound:
            return t
    allowed = [
        t for t in range(lo, hi + 1)
        if current_lcm * t // math.gcd(current_lcm, t) <= cfg.hyperperiod_bound
    ]
    return rng.choice(allowed)


def generate_task(cfg: GenConfig, rng: random.Random, current_lcm: int = 1) -> Task:
    period = draw_period(cfg, current_lcm, rng)
    offset = rng.randint(1, period)
    u = draw_utilization(cfg, period, rng)
    while True:
        v = rng.randint(1, cfg.m)
        wcet = max(1, round(u * period / v))
        # a thread cannot use more than one processor: redraw v until C <= T
        if wcet <= period:
            break
    deadline = rng.randint(wcet, period)
    return Task(offset, (wcet,) * v, deadline, period)


def generate_system(cfg: GenConfig, rng: random.Random | None = None) -> TaskSystem:
    if rng is None:
        rng = random.Random(cfg.seed)
    tasks: list[Task] = []
    total = Fraction(0)
    lcm = 1
    while True:
        task = generate_task(cfg, rng, lcm)
        if total + task.utilization > cfg.m:
            break
        tasks.append(task)
        total += task.utilization
        lcm = lcm * task.period // math.gcd(lcm, task.period)
        if total == cfg.m:
            break
    assert tasks, "every task has u <= v <= m, so the first one always fits"
    return TaskSystem(tuple(tasks), cfg.m)
