"""Seeded Monte Carlo estimation and the headline experiments.

Replication ``r`` of a run draws its randomness only from word ``r`` of
``replication_seeds(master_seed, label, ...)``, and every aggregate is an
integer tally until the final division, so results do not depend on the
worker count or on how replications are chunked.
"""
from __future__ import annotations

import math
import time
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import _kernels
from .errors import NotBindingSchool, SpecInvalid
from .generators import GeneratorSpec, generate_instance, replication_seeds
from .market import MarketInstance
from .report import ExperimentReport, ReportRow

DEFAULT_EPSILON_GRID = (0.01, 0.02, 0.05, 0.1, 0.2, 0.5)
BOUND_CONSTANT = 17.0
EXPONENT_SCALE = 32.0
SLACK_SE = 3.0


@dataclass(frozen=True)
class McConfig:
    replications: int = 1000
    master_seed: int = 0
    epsilon_grid: tuple[float, ...] = DEFAULT_EPSILON_GRID
    workers: int = 1
    # size of the independent batch that estimates gamma-bar; defaults to replications
    gamma_bar_replications: int | None = None

    def __post_init__(self):
        if self.replications < 1:
            raise SpecInvalid("replications must be >= 1")
        g = tuple(float(e) for e in self.epsilon_grid)
        if not g or any(not 0 < e < 1 for e in g) or any(b <= a for a, b in zip(g, g[1:])):
            raise SpecInvalid("epsilon_grid must be strictly ascending inside (0, 1)")
        object.__setattr__(self, "epsilon_grid", g)
        if self.workers < 1:
            raise SpecInvalid("workers must be >= 1")

    @property
    def batch_a(self) -> int:
        return self.gamma_bar_replications or self.replications


def _chunks(seeds: np.ndarray, workers: int, max_size: int = 8192):
    # chunking only affects scheduling: tallies are integer sums and
    # per-replication outputs are concatenated in replication order
    size = max(1, min(max_size, -(-len(seeds) // (4 * workers))))
    return [seeds[lo:lo + size] for lo in range(0, len(seeds), size)]


def _map_chunks(fn, chunks, workers):
    if workers == 1 or len(chunks) == 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, chunks))


def simulate(inst: MarketInstance, replications: int, master_seed: int, label: str, *,
             workers: int = 1, demand: bool = False, lottery: bool = False):
    """Run RSD ``replications`` times under uniform orders.

    Returns ``(exhaust, demand_counts, lottery_counts)``: per-replication
    exhaustion ranks (R x m, -1 if the school did not fill) and the integer
    tallies described in :func:`rsdlab._kernels.simulate_batch` (None when not
    requested).
    """
    n, m = inst.n, inst.m

    def work(seeds):
        ex = np.empty((len(seeds), m), dtype=np.int64)
        dc = np.zeros((m, n) if demand else (0, 0), dtype=np.int64)
        lc = np.zeros((n, m + 1) if lottery else (0, 0), dtype=np.int64)
        _kernels.simulate_batch(inst.capacities, inst.pref_ptr, inst.pref_flat, seeds, n,
                                ex, dc, lc, demand, lottery)
        return ex, dc, lc

    seeds = replication_seeds(master_seed, label, replications)
    parts = _map_chunks(work, _chunks(seeds, workers), workers)
    exhaust = np.concatenate([p[0] for p in parts])
    dc = sum(p[1] for p in parts) if demand else None
    lc = sum(p[2] for p in parts) if lottery else None
    return exhaust, dc, lc


# estimators

@dataclass(frozen=True)
class MeanDemand:
    school: int
    mean: np.ndarray
    stderr: np.ndarray
    replications: int


def estimate_mean_demands(inst: MarketInstance, schools: Sequence[int], cfg: McConfig,
                          label: str = "mean-demand") -> list[MeanDemand]:
    """Average of tau_k(t), t = 0..n, for several schools over the same orders."""
    n = inst.n
    schools = np.asarray(schools, dtype=np.int64)

    def work(seeds):
        s = np.zeros((len(schools), n + 1), dtype=np.int64)
        s2 = np.zeros((len(schools), n + 1), dtype=np.int64)
        _kernels.demand_moments_batch(inst.capacities, inst.pref_ptr, inst.pref_flat,
                                      seeds, n, schools, s, s2)
        return s, s2

    seeds = replication_seeds(cfg.master_seed, label, cfg.replications)
    parts = _map_chunks(work, _chunks(seeds, cfg.workers), cfg.workers)
    sums = sum(p[0] for p in parts)
    sumsq = sum(p[1] for p in parts)
    R = cfg.replications
    mean = sums / R
    if R > 1:
        var = np.maximum(sumsq - sums.astype(float) ** 2 / R, 0.0) / (R - 1)
        se = np.sqrt(var / R)
    else:
        se = np.where(sums == 0, 0.0, np.inf)
    return [MeanDemand(int(k), mean[a], se[a], R) for a, k in enumerate(schools)]


def estimate_mean_demand(inst: MarketInstance, k: int, cfg: McConfig) -> MeanDemand:
    """Average of tau_k(t) over independent uniform orders, t = 0..n."""
    return estimate_mean_demands(inst, [k], cfg)[0]


@dataclass(frozen=True)
class GammaBar:
    """Estimated deterministic cutoff; ``t`` is None when the mean never reaches capacity."""

    school: int
    t: int | None
    n: int

    @property
    def binding(self) -> bool:
        return self.t is not None

    @property
    def gamma(self) -> float | None:
        return None if self.t is None else self.t / self.n


def crossing_times(demand_counts: np.ndarray, capacities: np.ndarray, replications: int) -> np.ndarray:
    """First t with mean tau_k(t) >= capacity_k, from summed tallies; -1 if never."""
    cum = np.cumsum(demand_counts, axis=1)
    reached = cum >= capacities[:, None] * replications
    t = np.argmax(reached, axis=1) + 1
    return np.where(reached[:, -1], t, -1)


def estimate_gamma_bars(inst: MarketInstance, cfg: McConfig, replications: int | None = None,
                        label: str = "gamma-bar") -> list[GammaBar]:
    R = replications or cfg.batch_a
    _, dc, _ = simulate(inst, R, cfg.master_seed, label, workers=cfg.workers, demand=True)
    ts = crossing_times(dc, inst.capacities, R)
    return [GammaBar(k, None if t < 0 else int(t), inst.n) for k, t in enumerate(ts)]


def estimate_gamma_bar(inst: MarketInstance, k: int, cfg: McConfig) -> GammaBar:
    return estimate_gamma_bars(inst, cfg, cfg.replications)[k]


@dataclass(frozen=True)
class LotteryEstimate:
    """Assignment frequencies; column m is Unmatched."""

    counts: np.ndarray
    replications: int

    @property
    def probabilities(self) -> np.ndarray:
        return self.counts / self.replications

    @property
    def stderr(self) -> np.ndarray:
        p = self.probabilities
        return np.sqrt(p * (1 - p) / self.replications)


def estimate_lottery_probabilities(inst: MarketInstance, cfg: McConfig) -> LotteryEstimate:
    _, _, lc = simulate(inst, cfg.replications, cfg.master_seed, "lottery",
                        workers=cfg.workers, lottery=True)
    return LotteryEstimate(lc, cfg.replications)


# tail experiments

def single_school_bound(epsilon: float, capacity: float, gamma_bar: float) -> float:
    return BOUND_CONSTANT * math.exp(-epsilon * capacity / (EXPONENT_SCALE * gamma_bar))


def uniform_bound(epsilon: float, m: int, eta: float) -> float:
    return BOUND_CONSTANT * math.exp(math.log(m) - epsilon * eta / EXPONENT_SCALE)


def _binomial_se(p: float, R: int) -> float:
    return math.sqrt(max(p * (1 - p), 0.0) / R)


def _exceeds(dev: np.ndarray, eps: float, n: int) -> np.ndarray:
    # deviations are integers in rank units; guard against eps * n rounding just above an integer
    return dev >= eps * n * (1 - 1e-12)


def tail_batches(inst: MarketInstance, cfg: McConfig):
    """(gamma-bar estimates, last admitted rank per replication and school).

    The two come from independent replication streams. Pass the result as
    ``batches=`` to run both tail experiments on the same simulations.
    """
    bars = estimate_gamma_bars(inst, cfg)
    exhaust, _, _ = simulate(inst, cfg.replications, cfg.master_seed, "tail", workers=cfg.workers)
    last = np.where(exhaust >= 0, exhaust + 1, inst.n)
    return bars, last


def cutoff_tail_experiment(inst: MarketInstance, k: int | Sequence[int] | None,
                           cfg: McConfig, batches=None) -> ExperimentReport:
    """Empirical P(|gamma_k - gamma_bar_k| >= eps) against the single-school bound.

    gamma-bar comes from one batch, deviations from a second independent one.
    ``k=None`` runs every school whose estimated mean demand reaches capacity.
    """
    t0 = time.perf_counter()
    bars, last = batches or tail_batches(inst, cfg)
    if k is None:
        schools = [b.school for b in bars if b.binding]
    else:
        schools = [k] if isinstance(k, (int, np.integer)) else list(k)
        missing = [s for s in schools if not bars[s].binding]
        if missing:
            raise NotBindingSchool(missing)
    R = cfg.replications
    rows = []
    for s in schools:
        tb = bars[s].t
        gb = tb / inst.n
        alpha = int(inst.capacities[s])
        g = last[:, s] / inst.n
        rows.append(ReportRow("gamma_bar", s, None, gb, 0.0, None))
        rows.append(ReportRow("gamma_mean", s, None, float(g.mean()),
                              float(g.std(ddof=1) / math.sqrt(R)) if R > 1 else math.inf, None))
        dev = np.abs(last[:, s] - tb)
        for eps in cfg.epsilon_grid:
            freq = float(np.count_nonzero(_exceeds(dev, eps, inst.n))) / R
            se = _binomial_se(freq, R)
            bound = single_school_bound(eps, alpha, gb)
            rows.append(ReportRow("tail", s, eps, freq, se, bound, freq <= bound + SLACK_SE * se))
    return ExperimentReport(
        "tail", rows, R, cfg.master_seed, time.perf_counter() - t0,
        {"n": inst.n, "m": inst.m, "gamma_bar_replications": cfg.batch_a,
         "schools": len(schools)})


def uniform_tail_experiment(inst: MarketInstance, cfg: McConfig, batches=None) -> ExperimentReport:
    """Empirical P(max_k |gamma_k - gamma_bar_k| >= eps) against the all-schools bound."""
    t0 = time.perf_counter()
    bars, last = batches or tail_batches(inst, cfg)
    missing = [b.school for b in bars if not b.binding]
    if missing:
        raise NotBindingSchool(missing)
    R = cfg.replications
    tb = np.array([b.t for b in bars])
    gb = tb / inst.n
    eta = float(np.min(inst.capacities / gb))
    dev = np.abs(last - tb[None, :]).max(axis=1)
    rows = [ReportRow("eta", None, None, eta, 0.0, None)]
    for eps in cfg.epsilon_grid:
        freq = float(np.count_nonzero(_exceeds(dev, eps, inst.n))) / R
        se = _binomial_se(freq, R)
        bound = uniform_bound(eps, inst.m, eta)
        rows.append(ReportRow("uniform_tail", None, eps, freq, se, bound,
                              freq <= bound + SLACK_SE * se))
    return ExperimentReport(
        "uniform-tail", rows, R, cfg.master_seed, time.perf_counter() - t0,
        {"n": inst.n, "m": inst.m, "eta": eta, "gamma_bar_replications": cfg.batch_a})


# toy model

def lottery_cutoffs(inst: MarketInstance, replications: int, master_seed: int, label: str,
                    workers: int = 1):
    """Per-replication cutoffs in lottery units and in normalized ranks.

    Each replication draws one Uniform[0, 1) number per student; lower
    numbers pick first. A school's lottery cutoff is the largest number it
    admits (0 if it admits nobody).
    """
    n, m = inst.n, inst.m

    def work(seeds):
        lot = np.empty((len(seeds), m))
        ex = np.empty((len(seeds), m), dtype=np.int64)
        _kernels.lottery_cutoffs_batch(inst.capacities, inst.pref_ptr, inst.pref_flat,
                                       seeds, n, lot, ex)
        return lot, ex

    seeds = replication_seeds(master_seed, label, replications)
    parts = _map_chunks(work, _chunks(seeds, workers), workers)
    lot = np.concatenate([p[0] for p in parts])
    ex = np.concatenate([p[1] for p in parts])
    rank = np.where(ex >= 0, ex + 1, n) / n
    return lot, rank


def block_instance(n: int, m: int) -> MarketInstance:
    if m < 1 or n % m:
        raise SpecInvalid(f"block instance needs m | n (n={n}, m={m})")
    return generate_instance(GeneratorSpec("Block", n, m))


def max_uniform_mean(c: int) -> float:
    """Mean of the largest of c independent Uniform[0, 1] draws."""
    return c / (c + 1)


def toy_model_law_check(n: int, m: int, cfg: McConfig, school: int = 0,
                        quantiles: Sequence[float] = (0.1, 0.25, 0.5, 0.75, 0.9)) -> ExperimentReport:
    """Lottery-unit cutoff of one block school against the cdf x**c.

    Rows: the cdf at the x where x**c hits each quantile, the Kolmogorov
    distance (compared with the DKW radius at false-fail rate 1e-3), and the
    sample mean against both c/(c+1) (checked) and 1 - 1/c (reported only).
    """
    t0 = time.perf_counter()
    inst = block_instance(n, m)
    c = n // m
    R = cfg.replications
    lot, _ = lottery_cutoffs(inst, R, cfg.master_seed, "toy-law", cfg.workers)
    g = lot[:, school]
    rows = []
    for q in quantiles:
        x = q ** (1.0 / c)
        emp = float(np.count_nonzero(g <= x)) / R
        se = _binomial_se(q, R)
        rows.append(ReportRow("cdf", school, x, emp, se, q, abs(emp - q) <= SLACK_SE * se))
    ks = stats.kstest(g, lambda x: np.clip(x, 0.0, 1.0) ** c)
    dkw = math.sqrt(math.log(2 / 1e-3) / (2 * R))
    rows.append(ReportRow("sup_distance", school, None, float(ks.statistic), 0.0, dkw,
                          float(ks.statistic) <= dkw))
    mean = float(g.mean())
    se = float(g.std(ddof=1) / math.sqrt(R)) if R > 1 else math.inf
    exact_mean = max_uniform_mean(c)
    rows.append(ReportRow("mean_vs_c_over_c_plus_1", school, None, mean, se, exact_mean,
                          abs(mean - exact_mean) <= SLACK_SE * se))
    rows.append(ReportRow("mean_vs_1_minus_1_over_c", school, None, mean, se, 1 - 1 / c, None))
    return ExperimentReport(
        "toy-law", rows, R, cfg.master_seed, time.perf_counter() - t0,
        {"n": n, "m": m, "c": c, "school": school,
         "reference_mean_c_over_c_plus_1": exact_mean,
         "reference_mean_1_minus_1_over_c": 1 - 1 / c,
         "reference_discrepancy": exact_mean - (1 - 1 / c)})


def min_cutoff_survival(m: int, c: float, t: float) -> float:
    """P(min_k gamma_k > t) = (1 - t**c)**m for the block model, lottery units."""
    return math.exp(m * math.log1p(-(t ** c))) if t < 1 else 0.0


def phase_transition_sizes(m: int, alpha: float) -> tuple[int, int]:
    """(n, c): n = m ln m / alpha rounded to the nearest positive multiple of m."""
    if m < 2 or alpha <= 0:
        raise SpecInvalid("phase transition needs m >= 2 and alpha > 0")
    c = max(1, round(m * math.log(m) / alpha / m))
    return c * m, c


def phase_transition_experiment(m: int, alpha: float, epsilon: float, cfg: McConfig,
                                t_values: Sequence[float] = (0.3, 0.5, 0.8)) -> ExperimentReport:
    """Survival of the smallest block cutoff near the n = m ln m / alpha boundary.

    Since n must be a multiple of m, c is rounded and the effective
    ``alpha_eff = ln m / c`` is reported; ``exp(-alpha_eff)`` is where the
    finite-m law equals ``(1 - 1/m)**m`` exactly.
    """
    if not 0 < epsilon:
        raise SpecInvalid("epsilon must be positive")
    t0 = time.perf_counter()
    n, c = phase_transition_sizes(m, alpha)
    alpha_eff = math.log(m) / c
    inst = block_instance(n, m)
    R = cfg.replications
    lot, rank = lottery_cutoffs(inst, R, cfg.master_seed, "phase", cfg.workers)
    low_lot = lot.min(axis=1)
    low_rank = rank.min(axis=1)
    ts = list(t_values) + [math.exp(-alpha), math.exp(-alpha_eff),
                           math.exp(-(1 + epsilon) * alpha)]
    rows = []
    for t in dict.fromkeys(ts):
        exact = min_cutoff_survival(m, c, t)
        emp = float(np.count_nonzero(low_lot > t)) / R
        se = _binomial_se(exact, R)
        ok = abs(emp - exact) <= SLACK_SE * se if se > 0 else emp == exact
        rows.append(ReportRow("min_cutoff_survival", None, t, emp, se, exact, ok))
        rows.append(ReportRow("min_rank_cutoff_survival", None, t,
                              float(np.count_nonzero(low_rank > t)) / R,
                              _binomial_se(float(np.mean(low_rank > t)), R), None))
    rows.append(ReportRow("exact_vs_inverse_e", None, math.exp(-alpha_eff),
                          min_cutoff_survival(m, c, math.exp(-alpha_eff)), 0.0, math.exp(-1)))
    rows.append(ReportRow("exact_vs_one", None, math.exp(-(1 + epsilon) * alpha),
                          min_cutoff_survival(m, c, math.exp(-(1 + epsilon) * alpha)), 0.0, 1.0))
    return ExperimentReport(
        "phase-transition", rows, R, cfg.master_seed, time.perf_counter() - t0,
        {"m": m, "c": c, "n": n, "alpha": alpha, "alpha_effective": alpha_eff,
         "epsilon": epsilon})


def lottery_report(inst: MarketInstance, cfg: McConfig) -> ExperimentReport:
    t0 = time.perf_counter()
    est = estimate_lottery_probabilities(inst, cfg)
    p, se = est.probabilities, est.stderr
    rows = []
    for i in range(inst.n):
        for k in range(inst.m + 1):
            # school column m is Unmatched, written as -1
            rows.append(ReportRow(f"lottery_student_{i}", k if k < inst.m else -1, None,
                                  float(p[i, k]), float(se[i, k]), None))
    return ExperimentReport("lottery", rows, cfg.replications, cfg.master_seed,
                            time.perf_counter() - t0, {"n": inst.n, "m": inst.m})
