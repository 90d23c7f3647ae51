import itertools

import numpy as np
import pytest
from scipy import stats

from rsdlab import GeneratorSpec, Permutation, SpecInvalid, generate_instance, sample_permutation, substream
from rsdlab._kernels import seeded_order
from rsdlab.generators import (
    lottery_model_permutation,
    lottery_order,
    replication_order,
    replication_seeds,
)

PERMS3 = {p: i for i, p in enumerate(itertools.permutations(range(3)))}


def _chi2_pvalue(orders):
    counts = np.zeros(6)
    for o in orders:
        counts[PERMS3[tuple(int(x) for x in o)]] += 1
    return stats.chisquare(counts).pvalue, counts


def test_block_small():
    inst = generate_instance(GeneratorSpec("Block", 4, 2))
    assert inst.preferences == [[0], [0], [1], [1]]
    assert inst.capacities.tolist() == [2, 2]


def test_common_ranking_small():
    inst = generate_instance(GeneratorSpec("CommonRanking", 3, 2))
    assert inst.preferences == [[0, 1], [0, 1], [0, 1]]


@pytest.mark.parametrize("kind, extra", [
    ("UniformFull", {}),
    ("UniformPartial", {"list_length": 3}),
    ("PlackettLuce", {"weights": (1.0, 2.0, 3.0, 4.0, 5.0)}),
])
def test_generators_deterministic(kind, extra):
    spec = GeneratorSpec(kind, 50, 5, seed=11, **extra)
    assert generate_instance(spec) == generate_instance(spec)
    other = GeneratorSpec(kind, 50, 5, seed=12, **extra)
    assert generate_instance(spec) != generate_instance(other)


def test_uniform_partial_lists_distinct_and_sized():
    for m, L in ((100, 5), (10, 8)):
        inst = generate_instance(GeneratorSpec("UniformPartial", 300, m, list_length=L, seed=3))
        for row in inst.preferences:
            assert len(row) == L and len(set(row)) == L


def test_uniform_full_first_choice_is_uniform():
    inst = generate_instance(GeneratorSpec("UniformFull", 20000, 4, seed=5))
    first = np.array([p[0] for p in inst.preferences])
    assert stats.chisquare(np.bincount(first, minlength=4)).pvalue > 1e-3


def test_plackett_luce_first_choice_frequency():
    w = np.array([1.0, 2.0, 3.0, 4.0])
    inst = generate_instance(GeneratorSpec("PlackettLuce", 20000, 4, seed=2, weights=tuple(w)))
    first = np.bincount([p[0] for p in inst.preferences], minlength=4)
    expected = 20000 * w / w.sum()
    assert stats.chisquare(first, expected).pvalue > 1e-3


@pytest.mark.parametrize("spec", [
    GeneratorSpec("Block", 5, 2),
    GeneratorSpec("Nope", 4, 2),
    GeneratorSpec("UniformPartial", 4, 2),
    GeneratorSpec("PlackettLuce", 4, 2, weights=(1.0,)),
    GeneratorSpec("UniformFull", 2, 3),
    GeneratorSpec("UniformFull", 4, 2, capacities=(1, 0)),
])
def test_invalid_specs(spec):
    with pytest.raises(SpecInvalid):
        generate_instance(spec)


def test_sample_permutation_n1_and_reproducible():
    assert sample_permutation(1, substream(0, "x")) == Permutation.identity(1)
    a = sample_permutation(50, substream(9, "x", 3))
    b = sample_permutation(50, substream(9, "x", 3))
    assert a == b
    assert a != sample_permutation(50, substream(9, "x", 4))


def test_sample_permutation_uniform_n3():
    rng = substream(2024, "uniformity")
    p, counts = _chi2_pvalue(sample_permutation(3, rng).student_at for _ in range(60000))
    assert p > 1e-3
    se = np.sqrt(60000 * (1 / 6) * (5 / 6))
    assert np.all(np.abs(counts - 10000) <= 4 * se)


def test_replication_orders_uniform_n3():
    # the in-kernel shuffle the Monte Carlo engine uses
    seeds = replication_seeds(7, "chk", 30000)
    p, _ = _chi2_pvalue(seeded_order(s, 3) for s in seeds)
    assert p > 1e-3
    assert replication_order(7, "chk", 123, 3).student_at.tolist() == seeded_order(seeds[123], 3).tolist()


def test_lottery_model_uniform_n3():
    rng = substream(5, "lottery-model")
    p, _ = _chi2_pvalue(lottery_model_permutation(3, rng)[0].student_at for _ in range(30000))
    assert p > 1e-3


def test_lottery_order_example():
    assert lottery_order(np.array([0.2, 0.9, 0.5])).tolist() == [0, 2, 1]
    # ties go to the lower index
    assert lottery_order(np.array([0.5, 0.5, 0.1])).tolist() == [2, 0, 1]


def test_replication_seeds_prefix_stable():
    a = replication_seeds(3, "lab", 100)
    b = replication_seeds(3, "lab", 1000)
    assert np.array_equal(a, b[:100])
    assert not np.array_equal(a, replication_seeds(3, "other", 100))
