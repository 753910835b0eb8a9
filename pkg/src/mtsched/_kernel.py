"""Compiled verdict kernels used by the analysis fast path.

Same dispatch rules as :mod:`mtsched.engine`, but no trace or per-job
bookkeeping: the kernels return the first miss of a job released before
``window`` (stopping there) or, failing that, the per-task worst response
time over jobs released before ``window``.

Entries are given in priority order. Each entry keeps a FIFO ring of its
pending jobs; with stop-on-first-relevant-miss at most
``ceil(max_deadline / period) + 2`` jobs of one entry are ever pending.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_I64 = np.int64
_NONE = -1


@njit(cache=True)
def _run(offset, period, wcet, deadline, task, width, m, n_tasks, horizon, window, gang):
    r = offset.shape[0]
    cap = 2
    for e in range(r):
        c = (deadline.max() + period[e] - 1) // period[e] + 2
        if c > cap:
            cap = c
    q_rem = np.zeros((r, cap), dtype=np.int64)
    q_k = np.zeros((r, cap), dtype=np.int64)
    q_arr = np.zeros((r, cap), dtype=np.int64)
    q_missed = np.zeros((r, cap), dtype=np.bool_)
    q_head = np.zeros(r, dtype=np.int64)
    q_len = np.zeros(r, dtype=np.int64)
    next_arr = offset.copy()
    next_k = np.zeros(r, dtype=np.int64)
    run_e = np.zeros(m, dtype=np.int64)
    run_s = np.zeros(m, dtype=np.int64)
    wcrt = np.zeros(n_tasks, dtype=np.int64)

    t = 0
    while True:
        # releases
        for e in range(r):
            if next_arr[e] == t and t < horizon:
                k = next_k[e]
                next_k[e] = k + 1
                next_arr[e] = t + period[e]
                if q_len[e] == cap:
                    return 2, e, k, t, wcrt  # capacity exhausted; caller falls back
                s = (q_head[e] + q_len[e]) % cap
                q_rem[e, s] = wcet[e]
                q_k[e, s] = k
                q_arr[e, s] = t
                q_missed[e, s] = False
                q_len[e] += 1
        # deadline checks, in (rank, job) order
        for e in range(r):
            for x in range(q_len[e]):
                s = (q_head[e] + x) % cap
                if not q_missed[e, s] and q_arr[e, s] + deadline[e] <= t:
                    q_missed[e, s] = True
                    if q_arr[e, s] < window:
                        return 1, e, q_k[e, s], q_arr[e, s] + deadline[e], wcrt
        if t >= horizon:
            return 0, _NONE, _NONE, _NONE, wcrt

        # dispatch
        free = m
        n_run = 0
        for e in range(r):
            if free == 0:
                break
            for x in range(q_len[e]):
                if gang:
                    if width[e] <= free:
                        run_e[n_run] = e
                        run_s[n_run] = (q_head[e] + x) % cap
                        n_run += 1
                        free -= width[e]
                else:
                    run_e[n_run] = e
                    run_s[n_run] = (q_head[e] + x) % cap
                    n_run += 1
                    free -= 1
                if free == 0:
                    break

        nt = horizon
        for e in range(r):
            if next_arr[e] < nt:
                nt = next_arr[e]
            for x in range(q_len[e]):
                s = (q_head[e] + x) % cap
                dl = q_arr[e, s] + deadline[e]
                if not q_missed[e, s] and dl < nt:
                    nt = dl
        for i in range(n_run):
            end = t + q_rem[run_e[i], run_s[i]]
            if end < nt:
                nt = end

        dt = nt - t
        for i in range(n_run):
            e = run_e[i]
            s = run_s[i]
            q_rem[e, s] -= dt
            if q_rem[e, s] == 0 and q_arr[e, s] < window:
                resp = nt - q_arr[e, s]
                if resp > wcrt[task[e]]:
                    wcrt[task[e]] = resp
        # compact finished jobs out of each ring, preserving FIFO order
        for e in range(r):
            kept = 0
            for x in range(q_len[e]):
                s = (q_head[e] + x) % cap
                if q_rem[e, s] > 0:
                    d = (q_head[e] + kept) % cap
                    q_rem[e, d] = q_rem[e, s]
                    q_k[e, d] = q_k[e, s]
                    q_arr[e, d] = q_arr[e, s]
                    q_missed[e, d] = q_missed[e, s]
                    kept += 1
            q_len[e] = kept
        t = nt


def verdict(system, scheduler, horizon: int, window: int):
    """Return ``(miss, wcrt)``; ``miss`` is ``(ident, deadline)`` or None.

    Returns None when the kernel cannot represent the run (caller must fall
    back to the reference engine).
    """
    if scheduler.gang:
        ranks = [(i, 0) for i in scheduler.task_order]
        width = [system.tasks[i].v for i in scheduler.task_order]
    else:
        ranks = list(scheduler.order)
        width = [1] * len(ranks)
    tasks = system.tasks
    offset = np.array([tasks[i].offset for i, _ in ranks], dtype=_I64)
    period = np.array([tasks[i].period for i, _ in ranks], dtype=_I64)
    wcet = np.array([tasks[i].wcets[j] for i, j in ranks], dtype=_I64)
    deadline = np.array([tasks[i].deadline for i, _ in ranks], dtype=_I64)
    task = np.array([i for i, _ in ranks], dtype=_I64)
    status, e, k, dl, wcrt = _run(
        offset, period, wcet, deadline, task, np.array(width, dtype=_I64),
        system.processors, system.n, horizon, window, scheduler.gang,
    )
    if status == 2:
        return None
    if status == 1:
        i, j = ranks[e]
        return ((i, None if scheduler.gang else j, int(k)), int(dl)), None
    return None, tuple(int(x) for x in wcrt)
