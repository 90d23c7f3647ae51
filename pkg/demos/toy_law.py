"""Block model: the lottery cutoff of a school is the largest of c uniform draws.

Compares the empirical cdf with x**c and prints both candidate means.

    python demos/toy_law.py [n] [m] [replications]
"""
import sys

from rsdlab.montecarlo import McConfig, toy_model_law_check

n, m, reps = (int(a) for a in (sys.argv[1:] + ["1000", "10", "10000"][len(sys.argv) - 1:]))
rep = toy_model_law_check(n, m, McConfig(replications=reps, master_seed=0))
c = n // m

print(f"block instance n={n} m={m}, c={c} students per school, {reps} lottery draws")
print(f"{'x':>10} {'x^c':>8} {'empirical':>10}")
for row in rep.select("cdf"):
    print(f"{row.t_or_epsilon:10.6f} {row.bound:8.3f} {row.estimate:10.4f}")

ks = rep.select("sup_distance")[0]
print(f"\nsup distance {ks.estimate:.4f} (DKW radius at 1e-3: {ks.bound:.4f})")
mean = rep.select("mean_vs_c_over_c_plus_1")[0]
print(f"sample mean {mean.estimate:.5f} +- {mean.stderr:.1e}")
print(f"  c/(c+1) = {mean.bound:.5f}")
print(f"  1 - 1/c = {1 - 1 / c:.5f}   (gap {mean.bound - (1 - 1 / c):.2e})")
