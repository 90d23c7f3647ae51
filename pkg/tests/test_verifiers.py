import json
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from rsdlab import InstanceTooLarge, Permutation, apply_transposition, hamming_distance, validate_instance
from rsdlab.market import demand_matrix
from rsdlab.montecarlo import McConfig, block_instance
from rsdlab.verifiers import (
    capped_demand_matrix,
    check_cutoff_equivalence,
    check_decomposition,
    check_hamming_lipschitz,
    check_increasing_differences,
    check_insertion_inequality,
    check_transposition_identity,
    check_transposition_lipschitz,
    edge_instances,
    enumerate_oracle,
    first_difference_violation,
    inflated_engine,
    insertion_violation,
    mc_vs_oracle,
    random_battery,
    run_suite,
)

# smallest instance found where one transposition moves tau by more than 2
SWAP_WITNESS = dict(
    n=7, m=4, capacities=[1, 2, 2, 1],
    preferences=[[1, 0, 3, 2], [1, 2, 0, 3], [2, 0, 3, 1], [3, 0, 1, 2],
                 [0, 1, 2, 3], [1, 0, 2, 3], [2, 0, 1, 3]],
)
SWAP_ORDER = [1, 5, 2, 0, 4, 6, 3]


# oracle

def test_oracle_two_students_one_seat():
    inst = validate_instance(dict(n=2, m=1, capacities=[1], preferences=[[0], [0]]))
    assert enumerate_oracle(inst).lottery_matrix() == [[Fraction(1, 2)] * 2] * 2


def test_oracle_all_prefer(all_prefer):
    o = enumerate_oracle(all_prefer)
    for row in o.lottery_matrix():
        assert row == [Fraction(1, 3)] * 3
    assert o.mean_demand(0) == [0, 1, 2, 3]
    assert o.first_differences(0) == [1, 1, 1]
    assert o.gamma_bar(0) == Fraction(1, 3)
    assert o.cutoff_distribution(0) == {Fraction(1, 3): 1}


def test_oracle_rows_sum_to_one_exactly():
    for inst in random_battery(1, 10, max_n=6):
        o = enumerate_oracle(inst)
        for row in o.lottery_matrix():
            assert sum(row) == 1 and all(isinstance(x, Fraction) for x in row)
        for k in range(inst.m):
            assert sum(o.cutoff_distribution(k).values()) == 1


def test_oracle_block_cutoff_law():
    o = enumerate_oracle(block_instance(4, 2))
    assert o.mean_demand(0) == [0, Fraction(1, 2), 1, Fraction(3, 2), 2]
    assert o.cutoff_distribution(0) == {Fraction(1, 2): Fraction(1, 6), Fraction(3, 4): Fraction(1, 3),
                                        Fraction(1): Fraction(1, 2)}


def test_oracle_guard():
    inst = validate_instance(dict(n=12, m=1, capacities=[3], preferences=[[0]] * 12))
    with pytest.raises(InstanceTooLarge):
        enumerate_oracle(inst)
    with pytest.raises(InstanceTooLarge):
        check_increasing_differences(inst)


# increasing differences

def test_differences_pass_on_examples(split4):
    assert check_increasing_differences(block_instance(4, 2)).passed
    assert check_increasing_differences(split4).passed
    partial = validate_instance(dict(n=4, m=2, capacities=[1, 1], preferences=[[0], [0, 1], [1], []]))
    assert check_increasing_differences(partial).passed


def test_difference_checker_catches_corruption():
    assert first_difference_violation([Fraction(1, 2), Fraction(1, 4)]) == 2
    assert first_difference_violation([0, Fraction(3, 2)]) == 2
    assert first_difference_violation([Fraction(-1, 5)]) == 1
    assert first_difference_violation([0, 0, 1]) is None


# permutation properties

def test_stated_transposition_bound_counterexample():
    inst = validate_instance(SWAP_WITNESS)
    pi = Permutation.from_order(SWAP_ORDER)
    a = demand_matrix(inst, pi)
    b = demand_matrix(inst, apply_transposition(pi, 0, 3))
    assert (a[1, 6], b[1, 6]) == (5, 2)
    capped = np.abs(capped_demand_matrix(inst, pi) - capped_demand_matrix(inst, apply_transposition(pi, 0, 3)))
    assert capped.max() <= 2


def test_transposition_checker_reports_witness():
    v = check_transposition_lipschitz([validate_instance(SWAP_WITNESS)], trials=0, exhaustive_max_n=7)
    assert not v.passed and v.witness["difference"] >= 3
    assert "witness:" in v.to_text()


def test_capped_engine_properties_hold():
    battery = random_battery(4, 12, max_n=5) + random_battery(5, 6, min_n=6, max_n=20, with_edges=False)
    for check in (check_transposition_lipschitz, check_hamming_lipschitz, check_insertion_inequality):
        v = check(battery, 2000, 4, capped_demand_matrix)
        assert v.passed, v.to_text()


def test_checkers_deterministic():
    battery = random_battery(6, 8, max_n=6)
    a = check_transposition_lipschitz(battery, 500, 6)
    b = check_transposition_lipschitz(battery, 500, 6)
    assert a == b


def test_inflated_engine_is_caught():
    battery = edge_instances()
    v = check_transposition_lipschitz(battery, 200, 0, inflated_engine)
    assert not v.passed and v.witness["difference"] == 3


def test_insertion_identical_prefix(split4):
    pi = Permutation.from_order([3, 1, 0, 2])
    # moving student 2 from rank 3 to rank 2 is one adjacent swap
    assert insertion_violation(split4, pi, 2, 2, capped_demand_matrix) is None
    assert insertion_violation(split4, pi, 2, 0, capped_demand_matrix) is None


def test_structural_checks_pass():
    battery = random_battery(7, 10, max_n=5)
    assert check_decomposition(battery, 500, 7).passed
    assert check_transposition_identity(battery, 500, 7).passed
    assert check_cutoff_equivalence(battery, 500, 7).passed


# calibration

@pytest.mark.parametrize("inst", [block_instance(4, 2), validate_instance(
    dict(n=3, m=2, capacities=[1, 1], preferences=[[0, 1]] * 3))])
def test_mc_vs_oracle_examples(inst):
    v = mc_vs_oracle(inst, McConfig(replications=10_000, master_seed=1))
    assert v.passed, v.to_text()


def test_run_suite_differences_and_unknown():
    (v,) = run_suite("differences", seed=0, battery_size=20)
    assert v.passed
    with pytest.raises(ValueError):
        run_suite("nope")


def test_stated_hamming_bound_counterexample():
    data = json.loads((Path(__file__).parent / "data" / "hamming_witness.json").read_text())
    inst = validate_instance(data["instance"])
    pi = Permutation.from_order(data["student_at"])
    sigma = apply_transposition(pi, *data["swap"])
    assert hamming_distance(pi, sigma) == 2
    a, b = demand_matrix(inst, pi), demand_matrix(inst, sigma)
    assert (a[2, 35], b[2, 35]) == (7, 12)
    assert np.abs(a - b).max() == 5 > 2 * 2
    capped = capped_demand_matrix(inst, pi) - capped_demand_matrix(inst, sigma)
    assert np.abs(capped).max() <= 2
