"""Market instances, permutations and the exact RSD machinery.

Conventions used throughout the package:

* ranks are 0-based; the student at rank ``r`` has normalized rank ``(r + 1) / n``;
* ``tau_k(t)`` counts the first ``t`` students in picking order (``t`` in
  ``0..n``) who weakly prefer school ``k`` to their own outcome;
* a school absent from a student's list is never weakly preferred, and an
  unmatched student weakly prefers every school on their list.
"""
from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    DuplicateSchoolInList,
    MoreSchoolsThanStudents,
    PermutationError,
    SchoolIndexOutOfRange,
    ShapeMismatch,
    ZeroCapacity,
)

UNMATCHED = -1


def _frozen(a, dtype=np.int64):
    a = np.ascontiguousarray(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class MarketInstance:
    """Students' strict (possibly partial) preference lists plus school capacities.

    Lists are held in CSR form; ``preferences`` rebuilds the nested lists.
    Build instances through :func:`validate_instance` or :meth:`from_csr`.
    """

    n: int
    m: int
    capacities: np.ndarray
    pref_ptr: np.ndarray
    pref_flat: np.ndarray

    @classmethod
    def from_csr(cls, capacities, pref_ptr, pref_flat) -> MarketInstance:
        capacities = _frozen(capacities)
        pref_ptr = _frozen(pref_ptr)
        pref_flat = _frozen(pref_flat)
        n = len(pref_ptr) - 1
        m = len(capacities)
        _check(n, m, capacities, pref_ptr, pref_flat)
        return cls(n, m, capacities, pref_ptr, pref_flat)

    @property
    def preferences(self) -> list[list[int]]:
        flat = self.pref_flat.tolist()
        ptr = self.pref_ptr.tolist()
        return [flat[ptr[i]:ptr[i + 1]] for i in range(self.n)]

    def preference_list(self, i: int) -> np.ndarray:
        return self.pref_flat[self.pref_ptr[i]:self.pref_ptr[i + 1]]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "capacities": self.capacities.tolist(),
            "preferences": self.preferences,
        }

    def __eq__(self, other):
        if not isinstance(other, MarketInstance):
            return NotImplemented
        return (
            self.n == other.n
            and self.m == other.m
            and np.array_equal(self.capacities, other.capacities)
            and np.array_equal(self.pref_ptr, other.pref_ptr)
            and np.array_equal(self.pref_flat, other.pref_flat)
        )

    __hash__ = None


def _check(n, m, capacities, ptr, flat):
    if m > n:
        raise MoreSchoolsThanStudents(f"m={m} schools exceeds n={n} students")
    if capacities.ndim != 1 or len(capacities) != m:
        raise ShapeMismatch(f"expected {m} capacities, got {len(capacities)}")
    bad = np.flatnonzero(capacities < 1)
    if bad.size:
        raise ZeroCapacity(f"school {int(bad[0])} has capacity {int(capacities[bad[0]])}")
    if ptr[0] != 0 or ptr[-1] != len(flat) or np.any(np.diff(ptr) < 0):
        raise ShapeMismatch("malformed preference offsets")
    out = np.flatnonzero((flat < 0) | (flat >= m))
    if out.size:
        q = int(out[0])
        student = int(np.searchsorted(ptr, q, side="right") - 1)
        raise SchoolIndexOutOfRange(
            f"student {student} lists school {int(flat[q])}, valid range is [0, {m})")
    dup = _kernels.first_duplicate(m, ptr, flat)
    if dup >= 0:
        raise DuplicateSchoolInList(f"student {dup} lists a school more than once")


def validate_instance(raw: Mapping | MarketInstance) -> MarketInstance:
    """Check a mapping with keys ``n``, ``m``, ``capacities``, ``preferences``.

    Raises one of the :class:`~rsdlab.errors.InstanceError` subclasses; the
    input is never repaired.
    """
    if isinstance(raw, MarketInstance):
        _check(raw.n, raw.m, raw.capacities, raw.pref_ptr, raw.pref_flat)
        return raw
    prefs = [list(p) for p in raw["preferences"]]
    caps = list(raw["capacities"])
    n = int(raw.get("n", len(prefs)))
    m = int(raw.get("m", len(caps)))
    if m > n:
        raise MoreSchoolsThanStudents(f"m={m} schools exceeds n={n} students")
    if len(prefs) != n:
        raise ShapeMismatch(f"n={n} but {len(prefs)} preference lists given")
    if len(caps) != m:
        raise ShapeMismatch(f"m={m} but {len(caps)} capacities given")
    for p in prefs:
        if any(int(k) != k for k in p):
            raise SchoolIndexOutOfRange(f"non-integer school id in {p}")
    ptr = np.zeros(n + 1, dtype=np.int64)
    ptr[1:] = np.cumsum([len(p) for p in prefs])
    flat = np.fromiter((k for p in prefs for k in p), dtype=np.int64, count=int(ptr[-1]))
    return MarketInstance.from_csr(np.asarray(caps, dtype=np.int64), ptr, flat)


@dataclass(frozen=True, eq=False)
class Permutation:
    """A picking order stored in both directions.

    ``student_at[r]`` is the student picking at rank ``r``; ``rank_of`` is its
    inverse.
    """

    rank_of: np.ndarray
    student_at: np.ndarray

    @classmethod
    def from_order(cls, student_at: Sequence[int]) -> Permutation:
        student_at = np.asarray(student_at, dtype=np.int64)
        return cls(_frozen(_inverse(student_at)), _frozen(student_at))

    @classmethod
    def from_ranks(cls, rank_of: Sequence[int]) -> Permutation:
        rank_of = np.asarray(rank_of, dtype=np.int64)
        return cls(_frozen(rank_of), _frozen(_inverse(rank_of)))

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls.from_order(np.arange(n))

    @property
    def n(self) -> int:
        return len(self.student_at)

    def __eq__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        return np.array_equal(self.student_at, other.student_at)

    __hash__ = None

    def __repr__(self):
        return f"Permutation(student_at={self.student_at.tolist()})"


def _inverse(a: np.ndarray) -> np.ndarray:
    n = len(a)
    if a.ndim != 1 or (n and (a.min() < 0 or a.max() >= n)):
        raise PermutationError("not a permutation of range(n)")
    inv = np.full(n, -1, dtype=np.int64)
    inv[a] = np.arange(n)
    if np.any(inv < 0):
        raise PermutationError("not a permutation of range(n)")
    return inv


@dataclass(frozen=True, eq=False)
class Assignment:
    """RSD outcome. ``school_of[i] == UNMATCHED`` (-1) for unmatched students;
    ``exhaustion_rank[k] == -1`` when school k never filled."""

    school_of: np.ndarray
    seats_filled: np.ndarray
    exhaustion_rank: np.ndarray

    def exhausted_at(self, k: int) -> int | None:
        r = int(self.exhaustion_rank[k])
        return None if r < 0 else r


@dataclass(frozen=True, eq=False)
class DemandTrajectory:
    school: int
    values: np.ndarray


@dataclass(frozen=True, eq=False)
class CutoffVector:
    """Normalized cutoffs; non-binding schools carry ``gamma = 1``."""

    gamma: np.ndarray
    binding: np.ndarray


def _replay(inst: MarketInstance, pi: Permutation):
    if pi.n != inst.n:
        raise PermutationError(f"permutation over {pi.n} students, instance has {inst.n}")
    school_of = np.empty(inst.n, dtype=np.int64)
    prefix_end = np.empty(inst.n, dtype=np.int64)
    seats = np.empty(inst.m, dtype=np.int64)
    exhaust = np.empty(inst.m, dtype=np.int64)
    _kernels.rsd_assign(inst.capacities, inst.pref_ptr, inst.pref_flat, pi.student_at,
                        school_of, prefix_end, seats, exhaust)
    return school_of, prefix_end, seats, exhaust


def run_rsd(inst: MarketInstance, pi: Permutation) -> Assignment:
    """Each student, in rank order, takes the first listed school with a free seat."""
    school_of, _, seats, exhaust = _replay(inst, pi)
    return Assignment(_frozen(school_of), _frozen(seats), _frozen(exhaust))


def demand_trajectory(inst: MarketInstance, pi: Permutation, k: int) -> DemandTrajectory:
    if not 0 <= k < inst.m:
        raise SchoolIndexOutOfRange(f"school {k} not in [0, {inst.m})")
    _, prefix_end, _, _ = _replay(inst, pi)
    values = np.empty(inst.n + 1, dtype=np.int64)
    _kernels.tau_single(k, inst.pref_ptr, inst.pref_flat, pi.student_at, prefix_end, values)
    return DemandTrajectory(k, _frozen(values))


def demand_matrix(inst: MarketInstance, pi: Permutation) -> np.ndarray:
    """All trajectories at once: row k is tau_k(0..n)."""
    _, prefix_end, _, _ = _replay(inst, pi)
    return _kernels.tau_matrix(inst.m, inst.pref_ptr, inst.pref_flat, pi.student_at, prefix_end)


def cutoffs_from_exhaustion(exhaustion_rank: np.ndarray, n: int) -> CutoffVector:
    binding = exhaustion_rank >= 0
    gamma = np.where(binding, (exhaustion_rank + 1) / n, 1.0)
    return CutoffVector(_frozen(gamma, np.float64), _frozen(binding, bool))


def cutoffs(inst: MarketInstance, pi: Permutation) -> CutoffVector:
    """Normalized rank of the last admitted student at each school that fills."""
    _, _, _, exhaust = _replay(inst, pi)
    return cutoffs_from_exhaustion(exhaust, inst.n)


def cutoffs_from_demand(inst: MarketInstance, tau: np.ndarray) -> CutoffVector:
    """Cutoffs as ``inf{t : tau_k(t) >= capacity_k} / n`` from a demand matrix."""
    reached = tau >= inst.capacities[:, None]
    binding = reached[:, -1]
    first = np.argmax(reached, axis=1)
    gamma = np.where(binding, first / inst.n, 1.0)
    return CutoffVector(_frozen(gamma, np.float64), _frozen(binding, bool))


# permutation algebra

def apply_transposition(pi: Permutation, i: int, j: int) -> Permutation:
    """Swap the ranks of students i and j."""
    if i == j:
        raise PermutationError("transposition needs two distinct students")
    rank_of = pi.rank_of.copy()
    rank_of[i], rank_of[j] = rank_of[j], rank_of[i]
    return Permutation.from_ranks(rank_of)


def insertion(pi: Permutation, j: int, s: int) -> Permutation:
    """Remove student j from the order and re-insert them at rank s.

    Everyone else keeps their relative order.
    """
    if not 0 <= s < pi.n:
        raise PermutationError(f"rank {s} not in [0, {pi.n})")
    order = np.delete(pi.student_at, pi.rank_of[j])
    return Permutation.from_order(np.insert(order, s, j))


def hamming_distance(pi: Permutation, sigma: Permutation) -> int:
    if pi.n != sigma.n:
        raise PermutationError("permutations over different numbers of students")
    return int(np.count_nonzero(pi.rank_of != sigma.rank_of))


def decompose_into_transpositions(sigma: Permutation, pi: Permutation) -> list[tuple[int, int]]:
    """Transpositions (i, j) that, applied to sigma in order, produce pi.

    Follows the cycles of the student relabelling that carries sigma to pi; a
    cycle of length L costs L - 1 swaps, so the result never exceeds
    ``hamming_distance(pi, sigma)``.
    """
    if pi.n != sigma.n:
        raise PermutationError("permutations over different numbers of students")
    rank = sigma.rank_of.copy()
    # who currently sits at each rank
    at = sigma.student_at.copy()
    target = pi.rank_of
    swaps = []
    for i in range(pi.n):
        # settle student i, then whoever got displaced, until the cycle closes
        while rank[i] != target[i]:
            j = at[target[i]]
            swaps.append((i, int(j)))
            ri, rj = rank[i], rank[j]
            rank[i], rank[j] = rj, ri
            at[ri], at[rj] = j, i
    return swaps


def compose_transpositions(sigma: Permutation, swaps) -> Permutation:
    rank_of = sigma.rank_of.copy()
    for i, j in swaps:
        rank_of[i], rank_of[j] = rank_of[j], rank_of[i]
    return Permutation.from_ranks(rank_of)
