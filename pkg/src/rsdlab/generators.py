"""Preference profiles, picking orders and seeded random streams."""
from __future__ import annotations

import zlib
from dataclasses import dataclass, field

import numpy as np

from .errors import SpecInvalid
from .market import MarketInstance, Permutation

KINDS = ("Block", "UniformFull", "UniformPartial", "CommonRanking", "PlackettLuce")


def substream(master_seed: int, label: str, index: int = 0) -> np.random.Generator:
    """Independent generator for one (purpose, replication) pair.

    The stream depends only on its own coordinates, never on how many
    replications run or in which order.
    """
    key = zlib.crc32(label.encode())
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(key, int(index)))
    return np.random.Generator(np.random.PCG64(ss))


def replication_seeds(master_seed: int, label: str, count: int) -> np.ndarray:
    """32-bit seeds for replications ``0..count-1`` of one labelled run.

    Word r depends only on (master_seed, label, r): asking for more
    replications extends the list without changing earlier entries.
    """
    key = zlib.crc32(label.encode())
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(key,))
    return ss.generate_state(count, np.uint32).astype(np.int64)


def replication_order(master_seed: int, label: str, index: int, n: int) -> Permutation:
    """The picking order that replication ``index`` of a Monte Carlo run uses."""
    from ._kernels import seeded_order

    seed = replication_seeds(master_seed, label, index + 1)[index]
    return Permutation.from_order(seeded_order(seed, n))


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    n: int
    m: int
    capacities: tuple[int, ...] | None = None
    seed: int = 0
    list_length: int | None = None
    weights: tuple[float, ...] | None = field(default=None)

    def resolved_capacities(self) -> np.ndarray:
        if self.capacities is None:
            return np.full(self.m, max(1, self.n // self.m), dtype=np.int64)
        return np.asarray(self.capacities, dtype=np.int64)

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise SpecInvalid(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.n < 1 or self.m < 1:
            raise SpecInvalid("n and m must be positive")
        if self.m > self.n:
            raise SpecInvalid(f"m={self.m} exceeds n={self.n}")
        caps = self.resolved_capacities()
        if len(caps) != self.m:
            raise SpecInvalid(f"need {self.m} capacities, got {len(caps)}")
        if np.any(caps < 1):
            raise SpecInvalid("capacities must be >= 1")
        if self.kind == "Block":
            if self.n % self.m:
                raise SpecInvalid(f"Block needs m | n (n={self.n}, m={self.m})")
            if np.any(caps != self.n // self.m):
                raise SpecInvalid("Block needs every capacity equal to n/m")
        if self.kind == "UniformPartial" and self.list_length is None:
            raise SpecInvalid("UniformPartial needs list_length")
        if self.list_length is not None and not 1 <= self.list_length <= self.m:
            raise SpecInvalid(f"list_length must lie in [1, {self.m}]")
        if self.kind == "PlackettLuce":
            if self.weights is None or len(self.weights) != self.m:
                raise SpecInvalid("PlackettLuce needs m weights")
            if not all(w > 0 for w in self.weights):
                raise SpecInvalid("PlackettLuce weights must be positive")


def generate_instance(spec: GeneratorSpec) -> MarketInstance:
    """Build the instance described by ``spec``; deterministic in ``spec.seed``."""
    spec.validate()
    n, m = spec.n, spec.m
    caps = spec.resolved_capacities()
    rng = substream(spec.seed, f"instance/{spec.kind}")
    if spec.kind == "Block":
        c = n // m
        ptr = np.arange(n + 1, dtype=np.int64)
        flat = np.arange(n, dtype=np.int64) // c
        return MarketInstance.from_csr(caps, ptr, flat)
    if spec.kind == "CommonRanking":
        rows = np.broadcast_to(np.arange(m, dtype=np.int64), (n, m))
    elif spec.kind == "UniformFull":
        rows = rng.permuted(np.broadcast_to(np.arange(m, dtype=np.int64), (n, m)), axis=1)
    elif spec.kind == "UniformPartial":
        rows = _uniform_partial(rng, n, m, spec.list_length)
    else:
        rows = _plackett_luce(rng, n, np.asarray(spec.weights, dtype=float))
    if spec.list_length is not None:
        rows = rows[:, :spec.list_length]
    L = rows.shape[1]
    ptr = np.arange(0, n * L + 1, L, dtype=np.int64)
    return MarketInstance.from_csr(caps, ptr, np.ascontiguousarray(rows).ravel())


def _uniform_partial(rng, n, m, L):
    if 4 * L > m:
        return rng.permuted(np.broadcast_to(np.arange(m, dtype=np.int64), (n, m)), axis=1)[:, :L]
    # short lists from many schools: draw with replacement, redraw rows with repeats
    rows = rng.integers(0, m, size=(n, L))
    while True:
        s = np.sort(rows, axis=1)
        bad = np.flatnonzero(np.any(s[:, 1:] == s[:, :-1], axis=1))
        if not bad.size:
            return rows
        rows[bad] = rng.integers(0, m, size=(len(bad), L))


def _plackett_luce(rng, n, weights):
    # Gumbel-max: sorting log-weight + Gumbel noise is sequential sampling
    # without replacement proportional to the weights
    keys = np.log(weights) + rng.gumbel(size=(n, len(weights)))
    return np.argsort(-keys, axis=1, kind="stable").astype(np.int64)


def sample_permutation(n: int, rng: np.random.Generator) -> Permutation:
    """Uniform picking order (numpy's Fisher-Yates shuffle)."""
    if n < 1:
        raise SpecInvalid("n must be >= 1")
    return Permutation.from_order(rng.permutation(n))


def lottery_order(draws: np.ndarray) -> np.ndarray:
    """Ascending-draw order; equal draws go to the lower student index."""
    return np.argsort(draws, axis=-1, kind="stable")


def lottery_model_permutation(n: int, rng: np.random.Generator):
    """Independent Uniform[0, 1) lottery numbers and the order they induce.

    Smaller numbers pick first.
    """
    if n < 1:
        raise SpecInvalid("n must be >= 1")
    draws = rng.random(n)
    return Permutation.from_order(lottery_order(draws)), draws
