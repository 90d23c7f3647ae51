"""Compiled inner loops.

Preferences are passed in CSR form: student ``i`` lists
``flat[ptr[i]:ptr[i + 1]]``, best first.  Every kernel releases the GIL so
replication chunks can run on a thread pool.
"""
import numpy as np
from numba import njit

_JIT = dict(nogil=True, cache=True)


@njit(**_JIT)
def rsd_assign(caps, ptr, flat, student_at, school_of, prefix_end, seats, exhaust):
    """Serial dictatorship along ``student_at``.

    ``prefix_end[i]`` is the exclusive end (into ``flat``) of the part of i's
    list weakly preferred to their outcome: everything up to and including
    the chosen school, or the whole list when i is unmatched.
    """
    seats[:] = 0
    exhaust[:] = -1
    for p in range(student_at.shape[0]):
        i = student_at[p]
        choice = -1
        end = ptr[i + 1]
        for q in range(ptr[i], ptr[i + 1]):
            k = flat[q]
            if seats[k] < caps[k]:
                choice = k
                end = q + 1
                break
        school_of[i] = choice
        prefix_end[i] = end
        if choice >= 0:
            seats[choice] += 1
            if seats[choice] == caps[choice]:
                exhaust[choice] = p


@njit(**_JIT)
def tau_matrix(m, ptr, flat, student_at, prefix_end):
    n = student_at.shape[0]
    out = np.zeros((m, n + 1), dtype=np.int64)
    for p in range(n):
        i = student_at[p]
        for q in range(ptr[i], prefix_end[i]):
            out[flat[q], p + 1] += 1
    for k in range(m):
        for t in range(1, n + 1):
            out[k, t] += out[k, t - 1]
    return out


@njit(**_JIT)
def tau_single(k, ptr, flat, student_at, prefix_end, out):
    n = student_at.shape[0]
    out[0] = 0
    for p in range(n):
        i = student_at[p]
        hit = 0
        for q in range(ptr[i], prefix_end[i]):
            if flat[q] == k:
                hit = 1
                break
        out[p + 1] = out[p] + hit


@njit(**_JIT)
def seeded_order(seed, n):
    """Uniform order for one replication (Fisher-Yates on a freshly seeded stream)."""
    np.random.seed(seed)
    return np.random.permutation(n)


@njit(**_JIT)
def simulate_batch(caps, ptr, flat, seeds, n, exhaust_out, demand_counts, lottery_counts,
                   want_demand, want_lottery):
    """Run one RSD per seed.

    Writes per-replication exhaustion ranks into ``exhaust_out`` and, when
    requested, accumulates integer tallies: ``demand_counts[k, p]`` counts
    replications where the student at rank p weakly prefers k to their
    outcome; ``lottery_counts[i, k]`` counts outcomes (column m = unmatched).
    """
    m = caps.shape[0]
    school_of = np.empty(n, dtype=np.int64)
    prefix_end = np.empty(n, dtype=np.int64)
    seats = np.empty(m, dtype=np.int64)
    exhaust = np.empty(m, dtype=np.int64)
    for b in range(seeds.shape[0]):
        order = seeded_order(seeds[b], n)
        rsd_assign(caps, ptr, flat, order, school_of, prefix_end, seats, exhaust)
        exhaust_out[b, :] = exhaust
        if want_demand:
            for p in range(n):
                i = order[p]
                for q in range(ptr[i], prefix_end[i]):
                    demand_counts[flat[q], p] += 1
        if want_lottery:
            for i in range(n):
                a = school_of[i]
                if a < 0:
                    lottery_counts[i, m] += 1
                else:
                    lottery_counts[i, a] += 1


@njit(**_JIT)
def demand_moments_batch(caps, ptr, flat, seeds, n, schools, sums, sumsq):
    """Accumulate sum and sum of squares of tau_k(t) for each k in ``schools``."""
    m = caps.shape[0]
    school_of = np.empty(n, dtype=np.int64)
    prefix_end = np.empty(n, dtype=np.int64)
    seats = np.empty(m, dtype=np.int64)
    exhaust = np.empty(m, dtype=np.int64)
    traj = np.empty(n + 1, dtype=np.int64)
    for b in range(seeds.shape[0]):
        order = seeded_order(seeds[b], n)
        rsd_assign(caps, ptr, flat, order, school_of, prefix_end, seats, exhaust)
        for a in range(schools.shape[0]):
            tau_single(schools[a], ptr, flat, order, prefix_end, traj)
            for t in range(n + 1):
                sums[a, t] += traj[t]
                sumsq[a, t] += traj[t] * traj[t]


@njit(**_JIT)
def lottery_cutoffs_batch(caps, ptr, flat, seeds, n, lottery_out, exhaust_out):
    """RSD under lottery orders: each student draws Uniform[0, 1), lower draws pick first.

    The lottery cutoff of k is the largest draw it admits (0 if none).
    Stable sort, so equal draws go to the lower student index.
    """
    m = caps.shape[0]
    school_of = np.empty(n, dtype=np.int64)
    prefix_end = np.empty(n, dtype=np.int64)
    seats = np.empty(m, dtype=np.int64)
    exhaust = np.empty(m, dtype=np.int64)
    for b in range(seeds.shape[0]):
        np.random.seed(seeds[b])
        draws = np.random.random(n)
        order = np.argsort(draws, kind="mergesort")
        rsd_assign(caps, ptr, flat, order, school_of, prefix_end, seats, exhaust)
        exhaust_out[b, :] = exhaust
        for k in range(m):
            lottery_out[b, k] = 0.0
        for i in range(n):
            a = school_of[i]
            if a >= 0 and draws[i] > lottery_out[b, a]:
                lottery_out[b, a] = draws[i]


@njit(**_JIT)
def first_duplicate(m, ptr, flat):
    """Index of the first student whose list repeats a school, or -1."""
    stamp = np.full(m, -1, dtype=np.int64)
    for i in range(ptr.shape[0] - 1):
        for q in range(ptr[i], ptr[i + 1]):
            k = flat[q]
            if stamp[k] == i:
                return i
            stamp[k] = i
    return -1
