"""Exact enumeration oracle and executable property checks.

The oracle replays RSD in plain Python over all n! orders and aggregates
with integers only, so it shares no code with the compiled engine that the
Monte Carlo estimators use.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InstanceTooLarge
from .generators import GeneratorSpec, generate_instance
from .market import (
    MarketInstance,
    Permutation,
    apply_transposition,
    compose_transpositions,
    cutoffs,
    cutoffs_from_demand,
    decompose_into_transpositions,
    demand_matrix,
    hamming_distance,
    insertion,
    validate_instance,
)
from .montecarlo import McConfig, estimate_lottery_probabilities, estimate_mean_demands

ORACLE_MAX_N = 9


# oracle

def reference_rsd(capacities, preferences, order):
    """Plain replay: returns (school_of, weak) where weak[i] is the set of
    schools student i weakly prefers to their outcome."""
    seats = [0] * len(capacities)
    school_of = [-1] * len(preferences)
    weak = [()] * len(preferences)
    for i in order:
        prefs = preferences[i]
        weak[i] = tuple(prefs)
        for pos, k in enumerate(prefs):
            if seats[k] < capacities[k]:
                seats[k] += 1
                school_of[i] = k
                weak[i] = tuple(prefs[:pos + 1])
                break
    return school_of, weak


@dataclass
class OracleResult:
    """Exact integer tallies over all n! orders.

    ``demand_sums[k][t]`` is the sum of tau_k(t) over all orders;
    ``cutoff_counts[k][r]`` counts orders where school k fills at rank r, with
    index n for "never fills"; ``lottery_counts[i][k]`` counts orders assigning
    i to k (column m = unmatched).
    """

    n: int
    m: int
    capacities: list[int]
    total: int
    demand_sums: list[list[int]]
    cutoff_counts: list[list[int]]
    lottery_counts: list[list[int]]

    def mean_demand(self, k: int) -> list[Fraction]:
        return [Fraction(v, self.total) for v in self.demand_sums[k]]

    def first_differences(self, k: int) -> list[Fraction]:
        s = self.demand_sums[k]
        return [Fraction(s[t] - s[t - 1], self.total) for t in range(1, self.n + 1)]

    def gamma_bar(self, k: int) -> Fraction | None:
        """inf{t : E tau_k(t) >= capacity_k} / n, or None if the mean never gets there."""
        need = self.capacities[k] * self.total
        for t, v in enumerate(self.demand_sums[k]):
            if v >= need:
                return Fraction(t, self.n)
        return None

    def binding_probability(self, k: int) -> Fraction:
        return Fraction(self.total - self.cutoff_counts[k][self.n], self.total)

    def cutoff_distribution(self, k: int) -> dict[Fraction, Fraction]:
        """Law of gamma_k, with non-binding outcomes folded into gamma = 1."""
        dist: dict[Fraction, Fraction] = {}
        for r, c in enumerate(self.cutoff_counts[k]):
            if c:
                g = Fraction(min(r + 1, self.n), self.n)
                dist[g] = dist.get(g, Fraction(0)) + Fraction(c, self.total)
        return dist

    def lottery_matrix(self) -> list[list[Fraction]]:
        return [[Fraction(c, self.total) for c in row] for row in self.lottery_counts]


def enumerate_oracle(inst: MarketInstance, max_n: int = ORACLE_MAX_N) -> OracleResult:
    n, m = inst.n, inst.m
    if n > max_n:
        raise InstanceTooLarge(f"n={n} exceeds the enumeration cap {max_n}")
    caps = inst.capacities.tolist()
    prefs = inst.preferences
    increments = [[0] * n for _ in range(m)]
    cut = [[0] * (n + 1) for _ in range(m)]
    lottery = [[0] * (m + 1) for _ in range(n)]
    total = 0
    for order in itertools.permutations(range(n)):
        total += 1
        school_of, weak = reference_rsd(caps, prefs, order)
        filled = [0] * m
        last = [n] * m
        for p, i in enumerate(order):
            for k in weak[i]:
                increments[k][p] += 1
            a = school_of[i]
            if a >= 0:
                filled[a] += 1
                if filled[a] == caps[a]:
                    last[a] = p
        for k in range(m):
            cut[k][last[k]] += 1
        for i in range(n):
            lottery[i][school_of[i] if school_of[i] >= 0 else m] += 1
    demand = []
    for k in range(m):
        row = [0]
        for p in range(n):
            row.append(row[-1] + increments[k][p])
        demand.append(row)
    return OracleResult(n, m, caps, total, demand, cut, lottery)


# verdicts

@dataclass
class Verdict:
    name: str
    passed: bool
    trials: int
    seed: int | None = None
    witness: dict | None = None
    notes: list[str] = field(default_factory=list)
    violations: int = 0

    def __post_init__(self):
        if not self.passed and not self.violations:
            self.violations = 1

    def to_text(self) -> str:
        lines = [
            f"property: {self.name}",
            f"passed: {str(self.passed).lower()}",
            f"trials: {self.trials}",
            f"violations: {self.violations}",
            f"seed: {self.seed}",
        ]
        if self.witness:
            lines.append("witness: " + ", ".join(f"{k}={v}" for k, v in self.witness.items()))
        lines.extend(f"note: {x}" for x in self.notes)
        return "\n".join(lines) + "\n"


def _ints(a):
    return [int(x) for x in a]


def first_difference_violation(diffs) -> int | None:
    """Index t (1-based) of the first difference outside [0, 1] or below its predecessor."""
    prev = None
    for t, d in enumerate(diffs, start=1):
        if d < 0 or d > 1 or (prev is not None and d < prev):
            return t
        prev = d
    return None


def check_increasing_differences(inst: MarketInstance, oracle: OracleResult | None = None) -> Verdict:
    """t -> E tau_k(t) - E tau_k(t-1) is nondecreasing and lies in [0, 1], for every k."""
    oracle = oracle or enumerate_oracle(inst)
    for k in range(oracle.m):
        t = first_difference_violation(oracle.first_differences(k))
        if t is not None:
            d = oracle.first_differences(k)
            return Verdict("increasing_differences", False, oracle.m, witness={
                "school": k, "t": t, "difference": str(d[t - 1]),
                "previous": str(d[t - 2]) if t > 1 else "none"})
    return Verdict("increasing_differences", True, oracle.m)


# batteries

def edge_instances() -> list[MarketInstance]:
    raw = [
        dict(n=3, m=2, capacities=[1, 1], preferences=[[0, 1], [0, 1], [0, 1]]),
        dict(n=4, m=2, capacities=[1, 1], preferences=[[0, 1], [0, 1], [1, 0], [1, 0]]),
        dict(n=4, m=2, capacities=[2, 1], preferences=[[0], [0, 1], [1, 0], [1]]),
        dict(n=4, m=3, capacities=[1, 1, 2], preferences=[[], [2, 0], [0], [1, 2, 0]]),
        dict(n=5, m=1, capacities=[2], preferences=[[0]] * 5),
        dict(n=4, m=2, capacities=[4, 1], preferences=[[1, 0], [1, 0], [0], [1]]),
        dict(n=5, m=3, capacities=[1, 2, 1], preferences=[[2, 1, 0], [], [0, 2], [1], [0, 1, 2]]),
    ]
    return [validate_instance(r) for r in raw]


def random_battery(seed: int, count: int, min_n: int = 2, max_n: int = 8,
                   with_edges: bool = True) -> list[MarketInstance]:
    """Instances cycling through every generator kind with random sizes and capacities."""
    rng = np.random.default_rng(seed)
    out = [i for i in edge_instances() if min_n <= i.n <= max_n] if with_edges else []
    kinds = ("UniformFull", "UniformPartial", "CommonRanking", "PlackettLuce", "Block")
    j = 0
    while len(out) < count:
        kind = kinds[j % len(kinds)]
        j += 1
        n = int(rng.integers(min_n, max_n + 1))
        m = int(rng.integers(1, n + 1))
        if kind == "Block":
            divisors = [d for d in range(1, n + 1) if n % d == 0]
            m = int(rng.choice(divisors))
            caps = None
        else:
            hi = n if rng.random() < 0.15 else 3
            caps = tuple(int(x) for x in rng.integers(1, hi + 1, size=m))
        spec = GeneratorSpec(
            kind, n, m, capacities=caps, seed=int(rng.integers(2**63)),
            list_length=int(rng.integers(1, m + 1)) if kind == "UniformPartial" else None,
            weights=tuple(float(w) for w in rng.uniform(0.2, 5.0, size=m))
            if kind == "PlackettLuce" else None,
        )
        out.append(generate_instance(spec))
    return out[:count]


def _describe(inst):
    return {"capacities": _ints(inst.capacities), "preferences": inst.preferences}


# engines: (instance, permutation) -> demand matrix (m x (n+1))

def capped_demand_matrix(inst: MarketInstance, pi: Permutation) -> np.ndarray:
    """min(tau_k(t), capacity_k): demand counted only until the school fills.

    Cutoffs depend on tau only through this capped curve.
    """
    return np.minimum(demand_matrix(inst, pi), inst.capacities[:, None])


def inflated_engine(inst: MarketInstance, pi: Permutation) -> np.ndarray:
    """Deliberately broken engine for checker self-tests: every school's demand
    jumps by 3 instead of at most 1 when student 0 picks."""
    tau = demand_matrix(inst, pi)
    tau[:, pi.rank_of[0] + 1:] += 2
    return tau


def _suffix(engine) -> str:
    if engine is demand_matrix:
        return ""
    if engine is capped_demand_matrix:
        return "[capped]"
    return f"[{getattr(engine, '__name__', 'custom')}]"


class _Tables:
    """All n! demand matrices of a small instance, indexed by order."""

    def __init__(self, inst, engine):
        self.perms = [Permutation.from_order(p) for p in itertools.permutations(range(inst.n))]
        self.index = {tuple(p.student_at.tolist()): a for a, p in enumerate(self.perms)}
        self.tau = np.array([engine(inst, p) for p in self.perms])
        self.ranks = np.array([p.rank_of for p in self.perms])

    def find(self, pi):
        return self.index[tuple(pi.student_at.tolist())]


def _random_pair_students(rng, n):
    i, j = rng.choice(n, size=2, replace=False)
    return int(i), int(j)


def check_transposition_lipschitz(battery, trials: int, seed: int = 0, engine=demand_matrix,
                                  exhaustive_max_n: int = 5) -> Verdict:
    """|tau_k(t, pi) - tau_k(t, t_ij pi)| <= 2 for all t and k.

    Every order and every pair on battery instances with n <= exhaustive_max_n,
    then ``trials`` random draws of (instance, pi, i, j) over the battery.
    """
    name = "transposition_lipschitz" + _suffix(engine)
    checked = 0
    for b, inst in enumerate(battery):
        if inst.n < 2 or inst.n > exhaustive_max_n:
            continue
        tab = _Tables(inst, engine)
        for a, pi in enumerate(tab.perms):
            for i, j in itertools.combinations(range(inst.n), 2):
                other = tab.find(apply_transposition(pi, i, j))
                diff = np.abs(tab.tau[a] - tab.tau[other])
                checked += 1
                if diff.max() > 2:
                    k, t = np.unravel_index(np.argmax(diff), diff.shape)
                    return Verdict(name, False, checked, seed, {
                        "instance": b, "student_at": _ints(pi.student_at), "i": i, "j": j,
                        "school": int(k), "t": int(t), "difference": int(diff.max()),
                        **_describe(inst)})
    rng = np.random.default_rng(seed)
    pool = [x for x in battery if x.n >= 2]
    for _ in range(trials):
        b = int(rng.integers(len(pool)))
        inst = pool[b]
        pi = Permutation.from_order(rng.permutation(inst.n))
        i, j = _random_pair_students(rng, inst.n)
        diff = np.abs(engine(inst, pi) - engine(inst, apply_transposition(pi, i, j)))
        checked += 1
        if diff.max() > 2:
            k, t = np.unravel_index(np.argmax(diff), diff.shape)
            return Verdict(name, False, checked, seed, {
                "student_at": _ints(pi.student_at), "i": i, "j": j, "school": int(k),
                "t": int(t), "difference": int(diff.max()), **_describe(inst)})
    return Verdict(name, True, checked, seed)


def _random_sigma(rng, pi):
    n = pi.n
    if rng.random() < 0.25:
        return Permutation.from_order(rng.permutation(n))
    r = int(rng.integers(2, n + 1))
    who = rng.choice(n, size=r, replace=False)
    ranks = pi.rank_of.copy()
    ranks[who] = rng.permutation(ranks[who])
    return Permutation.from_ranks(ranks)


def check_hamming_lipschitz(battery, trials: int, seed: int = 0, engine=demand_matrix,
                            exhaustive_max_n: int = 5) -> Verdict:
    """max_k |tau_k(t, pi) - tau_k(t, sigma)| <= 2 d(pi, sigma) for all t."""
    name = "hamming_lipschitz" + _suffix(engine)
    checked = 0
    for b, inst in enumerate(battery):
        if inst.n > exhaustive_max_n:
            continue
        tab = _Tables(inst, engine)
        d = (tab.ranks[:, None, :] != tab.ranks[None, :, :]).sum(axis=2)
        gap = np.abs(tab.tau[:, None] - tab.tau[None, :]).max(axis=(2, 3))
        checked += d.size
        bad = np.argwhere(gap > 2 * d)
        if bad.size:
            x, y = bad[0]
            return Verdict(name, False, checked, seed, {
                "instance": b, "pi": _ints(tab.perms[x].student_at),
                "sigma": _ints(tab.perms[y].student_at), "distance": int(d[x, y]),
                "difference": int(gap[x, y]), **_describe(inst)})
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        inst = battery[int(rng.integers(len(battery)))]
        pi = Permutation.from_order(rng.permutation(inst.n))
        sigma = _random_sigma(rng, pi) if inst.n >= 2 else pi
        d = hamming_distance(pi, sigma)
        gap = int(np.abs(engine(inst, pi) - engine(inst, sigma)).max())
        checked += 1
        if gap > 2 * d:
            return Verdict(name, False, checked, seed, {
                "pi": _ints(pi.student_at), "sigma": _ints(sigma.student_at),
                "distance": d, "difference": gap, **_describe(inst)})
    return Verdict(name, True, checked, seed)


def insertion_violation(inst, pi, j, s, engine=demand_matrix):
    """First (h, k, difference, allowed) breaking the one-sided insertion bound, or None.

    With pi' = insertion(pi, j, s) and s < rank of j, the bound is
    |tau_k(r_h + 1, pi) - tau_k(r'_h + 1, pi')| <= 1{r_h >= s} for h != j, where
    r_h, r'_h are h's 0-based ranks (tau evaluated just after h picks).
    """
    moved = insertion(pi, j, s)
    a, b = engine(inst, pi), engine(inst, moved)
    for h in range(inst.n):
        if h == j:
            continue
        r, r2 = int(pi.rank_of[h]), int(moved.rank_of[h])
        diff = np.abs(a[:, r + 1] - b[:, r2 + 1])
        allowed = 1 if r >= s else 0
        if diff.max() > allowed:
            k = int(np.argmax(diff))
            return h, k, int(diff[k]), allowed
    return None


def check_insertion_inequality(battery, trials: int, seed: int = 0, engine=demand_matrix,
                               exhaustive_max_n: int = 5) -> Verdict:
    """One-sided bound for moving student j ahead to rank s (see :func:`insertion_violation`).

    Students ranked before s must see identical demand (allowed difference 0);
    the others may differ by at most 1.
    """
    name = "insertion_inequality" + _suffix(engine)
    checked = 0

    def fail(b, inst, pi, j, s, v):
        h, k, diff, allowed = v
        return Verdict(name, False, checked, seed, {
            "instance": b, "student_at": _ints(pi.student_at), "j": j, "s": s, "h": h,
            "school": k, "difference": diff, "allowed": allowed, **_describe(inst)})

    for b, inst in enumerate(battery):
        if inst.n < 2 or inst.n > exhaustive_max_n:
            continue
        for order in itertools.permutations(range(inst.n)):
            pi = Permutation.from_order(order)
            for j in range(inst.n):
                for s in range(int(pi.rank_of[j])):
                    checked += 1
                    v = insertion_violation(inst, pi, j, s, engine)
                    if v:
                        return fail(b, inst, pi, j, s, v)
    rng = np.random.default_rng(seed)
    pool = [x for x in battery if x.n >= 2]
    for _ in range(trials):
        b = int(rng.integers(len(pool)))
        inst = pool[b]
        pi = Permutation.from_order(rng.permutation(inst.n))
        j = int(pi.student_at[rng.integers(1, inst.n)])
        s = int(rng.integers(0, pi.rank_of[j]))
        checked += 1
        v = insertion_violation(inst, pi, j, s, engine)
        if v:
            return fail(b, inst, pi, j, s, v)
    return Verdict(name, True, checked, seed)


def check_transposition_identity(battery, trials: int, seed: int = 0) -> Verdict:
    """t_ij pi equals (j -> rank_pi(i)) applied after (i -> rank_pi(j))."""
    rng = np.random.default_rng(seed)
    pool = [x for x in battery if x.n >= 2]
    for t in range(trials):
        inst = pool[int(rng.integers(len(pool)))]
        pi = Permutation.from_order(rng.permutation(inst.n))
        i, j = _random_pair_students(rng, inst.n)
        via = insertion(insertion(pi, i, int(pi.rank_of[j])), j, int(pi.rank_of[i]))
        if via != apply_transposition(pi, i, j):
            return Verdict("transposition_as_insertions", False, t + 1, seed,
                           {"student_at": _ints(pi.student_at), "i": i, "j": j})
    return Verdict("transposition_as_insertions", True, trials, seed)


def check_decomposition(battery, trials: int, seed: int = 0, exhaustive_max_n: int = 5) -> Verdict:
    """Transpositions from decompose_into_transpositions carry sigma to pi, at most d of them."""
    name = "transposition_decomposition"
    checked = 0

    def one(sigma, pi):
        swaps = decompose_into_transpositions(sigma, pi)
        ok = compose_transpositions(sigma, swaps) == pi and len(swaps) <= hamming_distance(pi, sigma)
        return ok, swaps

    sizes = sorted({x.n for x in battery if x.n <= exhaustive_max_n})
    for n in sizes:
        perms = [Permutation.from_order(p) for p in itertools.permutations(range(n))]
        for sigma in perms:
            for pi in perms:
                checked += 1
                ok, swaps = one(sigma, pi)
                if not ok:
                    return Verdict(name, False, checked, seed, {
                        "sigma": _ints(sigma.student_at), "pi": _ints(pi.student_at),
                        "swaps": swaps})
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        n = int(rng.integers(1, 51))
        sigma = Permutation.from_order(rng.permutation(n))
        pi = _random_sigma(rng, sigma) if n >= 2 else sigma
        checked += 1
        ok, swaps = one(sigma, pi)
        if not ok:
            return Verdict(name, False, checked, seed, {
                "sigma": _ints(sigma.student_at), "pi": _ints(pi.student_at), "swaps": swaps})
    return Verdict(name, True, checked, seed)


def check_cutoff_equivalence(battery, trials: int, seed: int = 0, engine=demand_matrix) -> Verdict:
    """Sup-of-admitted-ranks cutoffs equal inf{t : tau_k(t) >= capacity_k}/n on binding schools."""
    rng = np.random.default_rng(seed)
    non_binding = 0
    for t in range(trials):
        inst = battery[int(rng.integers(len(battery)))]
        pi = Permutation.from_order(rng.permutation(inst.n))
        direct = cutoffs(inst, pi)
        via_tau = cutoffs_from_demand(inst, engine(inst, pi))
        non_binding += int(np.count_nonzero(~direct.binding))
        bad = np.flatnonzero((direct.binding != via_tau.binding)
                             | (direct.binding & (direct.gamma != via_tau.gamma)))
        if bad.size:
            k = int(bad[0])
            return Verdict("cutoff_equivalence" + _suffix(engine), False, t + 1, seed, {
                "student_at": _ints(pi.student_at), "school": k,
                "sup_definition": float(direct.gamma[k]), "inf_definition": float(via_tau.gamma[k]),
                **_describe(inst)})
    return Verdict("cutoff_equivalence" + _suffix(engine), True, trials, seed,
                   notes=[f"non-binding (school, order) pairs excluded: {non_binding}"])


# Monte Carlo calibration

def mc_vs_oracle(inst: MarketInstance, cfg: McConfig, oracle: OracleResult | None = None) -> Verdict:
    """Every estimate within 3 standard errors of its exact value.

    Cells whose standard error is 0 must match exactly. The Monte Carlo
    gamma-bar (first crossing of the estimated mean curve) may differ from the
    exact one only across times where the exact mean is itself within 3
    standard errors of capacity. All cells are evaluated; the witness is the
    first miss and ``violations`` counts them.
    """
    oracle = oracle or enumerate_oracle(inst)
    curves = estimate_mean_demands(inst, range(inst.m), cfg)
    lot = estimate_lottery_probabilities(inst, cfg)
    misses = []
    checked = 0

    def close(est, exact, se):
        return est == exact if se == 0 else abs(est - exact) <= 3 * se

    for k, curve in enumerate(curves):
        exact = [float(x) for x in oracle.mean_demand(k)]
        for t in range(inst.n + 1):
            checked += 1
            if not close(curve.mean[t], exact[t], curve.stderr[t]):
                misses.append({"quantity": "mean_demand", "school": k, "t": t,
                               "estimate": float(curve.mean[t]), "exact": exact[t],
                               "stderr": float(curve.stderr[t])})
        cap = int(inst.capacities[k])
        reached = np.flatnonzero(curve.mean >= cap - 1e-12)
        t_mc = int(reached[0]) if reached.size else inst.n + 1
        gb = oracle.gamma_bar(k)
        t_ex = inst.n + 1 if gb is None else int(gb * inst.n)
        checked += 1
        lo, hi = min(t_mc, t_ex), min(max(t_mc, t_ex), inst.n + 1)
        if not all(abs(exact[t] - cap) <= 3 * curve.stderr[t] for t in range(lo, hi)):
            misses.append({"quantity": "gamma_bar", "school": k,
                           "estimate_t": None if t_mc > inst.n else t_mc,
                           "exact_t": None if t_ex > inst.n else t_ex})
    p, se = lot.probabilities, lot.stderr
    for i in range(inst.n):
        for k in range(inst.m + 1):
            checked += 1
            exact = oracle.lottery_counts[i][k] / oracle.total
            if not close(p[i, k], exact, se[i, k]):
                misses.append({"quantity": "lottery", "student": i,
                               "school": k if k < inst.m else -1, "estimate": float(p[i, k]),
                               "exact": exact, "stderr": float(se[i, k])})
    return Verdict("mc_vs_oracle", not misses, checked, cfg.master_seed,
                   misses[0] if misses else None, violations=len(misses))


SUITES = ("oracle", "lipschitz", "insertion", "differences", "equivalence")


def run_suite(name: str, seed: int = 0, trials: int = 10_000, battery_size: int = 20,
              engine=None, replications: int = 10_000) -> list[Verdict]:
    """Run one named suite (or ``all``) on a seeded battery.

    Without an explicit ``engine`` the permutation properties run twice: on
    tau exactly as defined and on the capped demand.
    """
    if name == "all":
        out = []
        for s in SUITES:
            out.extend(run_suite(s, seed, trials, battery_size, engine, replications))
        return out
    engines = [engine] if engine is not None else [demand_matrix, capped_demand_matrix]
    small = random_battery(seed, battery_size, max_n=5)
    if name == "lipschitz":
        wide = small + random_battery(seed + 1, battery_size, min_n=6, max_n=50, with_edges=False)
        out = []
        for e in engines:
            out += [check_transposition_lipschitz(wide, trials, seed, e),
                    check_hamming_lipschitz(wide, trials, seed, e)]
        return out + [check_decomposition(small, trials, seed),
                      check_transposition_identity(wide, trials, seed)]
    if name == "insertion":
        wide = small + random_battery(seed + 1, battery_size, min_n=6, max_n=30, with_edges=False)
        return [check_insertion_inequality(wide, trials, seed, e) for e in engines]
    if name == "equivalence":
        wide = small + random_battery(seed + 1, battery_size, min_n=6, max_n=50, with_edges=False)
        return [check_cutoff_equivalence(wide, trials, seed, engines[0])]
    if name == "differences":
        out = []
        for inst in random_battery(seed, battery_size, max_n=8):
            v = check_increasing_differences(inst)
            if not v.passed:
                return [v]
            out.append(v)
        return [Verdict("increasing_differences", True, sum(v.trials for v in out), seed,
                        notes=[f"instances: {len(out)}"])]
    if name == "oracle":
        cfg = McConfig(replications=replications, master_seed=seed)
        results = [mc_vs_oracle(inst, cfg) for inst in small]
        bad = [v for v in results if not v.passed]
        if bad:
            return [bad[0]]
        return [Verdict("mc_vs_oracle", True, sum(v.trials for v in results), seed,
                        notes=[f"instances: {len(results)}"])]
    raise ValueError(f"unknown suite {name!r}; choose from {SUITES + ('all',)}")
