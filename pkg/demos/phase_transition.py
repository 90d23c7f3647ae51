"""Smallest block cutoff near n = m ln m / alpha.

For each m, prints the exact survival (1 - t**c)**m at t = exp(-alpha_eff)
(which tends to 1/e) next to a Monte Carlo estimate.

    python demos/phase_transition.py [alpha]
"""
import math
import sys

from rsdlab.montecarlo import McConfig, min_cutoff_survival, phase_transition_experiment, phase_transition_sizes

alpha = float(sys.argv[1]) if len(sys.argv) > 1 else 1.0
print(f"alpha = {alpha}")
print(f"{'m':>6} {'c':>3} {'n':>7} {'t':>7} {'exact':>8} {'mc':>8}")
for m in (2, 5, 10, 50, 100):
    n, c = phase_transition_sizes(m, alpha)
    t = math.exp(-math.log(m) / c)
    rep = phase_transition_experiment(m, alpha, 0.5, McConfig(replications=20_000), t_values=(t,))
    row = [r for r in rep.select("min_cutoff_survival") if math.isclose(r.t_or_epsilon, t)][0]
    print(f"{m:6d} {c:3d} {n:7d} {t:7.4f} {row.bound:8.4f} {row.estimate:8.4f}")

# the limit itself needs no simulation
for m in (10**3, 10**4, 10**6):
    c = max(1, round(math.log(m) / alpha))
    print(f"m={m:>8}: (1 - t^c)^m at t^c = 1/m -> {min_cutoff_survival(m, c, m ** (-1 / c)):.5f}")
print(f"1/e = {math.exp(-1):.5f}")
