"""Small markets where one swap in the picking order moves demand a lot.

tau_k(t) counts students among the first t who weakly prefer k to what they
got, and keeps counting after k is full. Capping at capacity removes the
effect; cutoffs only ever look at the capped curve.
"""
import json
from pathlib import Path

import numpy as np

from rsdlab import Permutation, apply_transposition, validate_instance
from rsdlab.market import demand_matrix, insertion
from rsdlab.verifiers import capped_demand_matrix, insertion_violation


def show(inst, pi, sigma, label):
    a, b = demand_matrix(inst, pi), demand_matrix(inst, sigma)
    d = np.abs(a - b)
    k, t = np.unravel_index(d.argmax(), d.shape)
    cd = np.abs(capped_demand_matrix(inst, pi) - capped_demand_matrix(inst, sigma)).max()
    print(f"{label}: tau_{k}({t}) = {a[k, t]} vs {b[k, t]}  (difference {d.max()}, capped {cd})")


seven = validate_instance(dict(
    n=7, m=4, capacities=[1, 2, 2, 1],
    preferences=[[1, 0, 3, 2], [1, 2, 0, 3], [2, 0, 3, 1], [3, 0, 1, 2],
                 [0, 1, 2, 3], [1, 0, 2, 3], [2, 0, 1, 3]]))
pi = Permutation.from_order([1, 5, 2, 0, 4, 6, 3])
show(seven, pi, apply_transposition(pi, 0, 3), "swap 0<->3, n=7 (bound 2)")

path = Path(__file__).resolve().parent.parent / "tests" / "data" / "hamming_witness.json"
if path.exists():
    data = json.loads(path.read_text())
    inst = validate_instance(data["instance"])
    pi = Permutation.from_order(data["student_at"])
    show(inst, pi, apply_transposition(pi, *data["swap"]), "swap at distance 2, n=36 (bound 4)")

four = validate_instance(dict(n=4, m=2, capacities=[1, 1],
                              preferences=[[0, 1], [0, 1], [1, 0], [1, 0]]))
pi = Permutation.from_order([0, 2, 1, 3])
print("\nmove student 1 to the front of", pi.student_at.tolist(), "->",
      insertion(pi, 1, 0).student_at.tolist())
h, k, diff, allowed = insertion_violation(four, pi, 1, 0)
print(f"student {h}, school {k}: difference {diff}, allowed {allowed}")
print("capped:", insertion_violation(four, pi, 1, 0, capped_demand_matrix))
