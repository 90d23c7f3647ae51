"""Cutoff deviations against the single-school and all-schools bounds.

The bounds carry large constants, so at desk sizes most rows are vacuous
(bound > 1); the interesting column is how fast the frequency drops with eps.

    python demos/tail_bounds.py
"""
from rsdlab.generators import GeneratorSpec, generate_instance
from rsdlab.montecarlo import McConfig, cutoff_tail_experiment, tail_batches, uniform_tail_experiment

inst = generate_instance(GeneratorSpec("UniformPartial", 5000, 20, capacities=(150,) * 20,
                                       list_length=4, seed=1))
cfg = McConfig(replications=5000, gamma_bar_replications=2000)
batches = tail_batches(inst, cfg)
tail = cutoff_tail_experiment(inst, None, cfg, batches)
uni = uniform_tail_experiment(inst, cfg, batches)

print("school 0")
for row in tail.select("gamma_bar", 0) + tail.select("gamma_mean", 0):
    print(f"  {row.quantity:<10} {row.estimate:.4f}")
for row in tail.select("tail", 0):
    print(f"  eps={row.t_or_epsilon:<5} freq={row.estimate:.4f}  bound={row.bound:.3g}")

print(f"\nall schools (eta = {uni.summary['eta']:.1f})")
for row in uni.select("uniform_tail"):
    print(f"  eps={row.t_or_epsilon:<5} freq={row.estimate:.4f}  bound={row.bound:.3g}")
print("\nall rows within bound + 3 s.e.:", tail.passed and uni.passed)
