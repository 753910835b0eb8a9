"""Independent reference implementations used as test oracles.

Everything here is deliberately naive: unit time steps, full enumeration.
"""

from __future__ import annotations


def smallest_arrival_chain(entries):
    """S_1 = O_1; S_i = smallest O_i + k*T_i (k >= 0) that is >= S_{i-1}."""
    points = []
    for offset, period in entries:
        if not points:
            points.append(offset)
            continue
        k = 0
        while offset + k * period < points[-1]:
            k += 1
        points.append(offset + k * period)
    return points


def brute_lcm(values):
    x = max(values)
    while any(x % v for v in values):
        x += max(values)
    return x


def step_threads(system, order, horizon, demands=None):
    """Unit-step global FSP simulation.

    Returns (rows, completions, misses): rows[t] is a tuple of thread ids or
    None per processor; misses is a sorted list of (deadline, ident).
    """
    demands = demands or {}
    m = system.processors
    rank = {tuple(ij): r for r, ij in enumerate(order)}
    rem = {}
    info = {}
    completions = {}
    misses = []
    rows = []
    for t in range(horizon + 1):
        if t < horizon:
            for i, task in enumerate(system.tasks):
                if t >= task.offset and (t - task.offset) % task.period == 0:
                    k = (t - task.offset) // task.period
                    for j, c in enumerate(task.wcets):
                        ident = (i, j, k)
                        d = demands.get(ident, c)
                        info[ident] = (t, t + task.deadline)
                        rem[ident] = d
                        completions[ident] = t if d == 0 else None
        for ident, (a, dl) in info.items():
            if dl == t and rem[ident] > 0:
                misses.append((dl, ident))
        if t == horizon:
            break
        ready = sorted((x for x in rem if rem[x] > 0), key=lambda x: (rank[x[:2]], x[2]))
        run = ready[:m]
        rows.append(tuple(run) + (None,) * (m - len(run)))
        for x in run:
            rem[x] -= 1
            if rem[x] == 0:
                completions[x] = t + 1
    misses.sort(key=lambda e: (e[0], rank[e[1][:2]], e[1][2]))
    return rows, completions, misses


def step_gang(system, task_order, horizon, demands=None):
    """Unit-step Gang FTP simulation with lowest-free-index packing."""
    demands = demands or {}
    m = system.processors
    rank = {i: r for r, i in enumerate(task_order)}
    rem = {}
    info = {}
    completions = {}
    misses = []
    rows = []
    for t in range(horizon + 1):
        if t < horizon:
            for i, task in enumerate(system.tasks):
                if t >= task.offset and (t - task.offset) % task.period == 0:
                    k = (t - task.offset) // task.period
                    d = demands.get((i, k), task.wcets[0])
                    info[(i, k)] = (t, t + task.deadline)
                    rem[(i, k)] = d
                    for j in range(task.v):
                        completions[(i, j, k)] = t if d == 0 else None
        for p, (a, dl) in info.items():
            if dl == t and rem[p] > 0:
                misses.append((dl, (p[0], None, p[1])))
        if t == horizon:
            break
        cells = [None] * m
        free = list(range(m))
        for p in sorted((x for x in rem if rem[x] > 0), key=lambda x: (rank[x[0]], x[1])):
            v = system.tasks[p[0]].v
            if v <= len(free):
                for j in range(v):
                    cells[free[j]] = (p[0], j, p[1])
                free = free[v:]
                rem[p] -= 1
                if rem[p] == 0:
                    for j in range(v):
                        completions[(p[0], j, p[1])] = t + 1
        rows.append(tuple(cells))
    misses.sort(key=lambda e: (e[0], rank[e[1][0]], e[1][2]))
    return rows, completions, misses
