"""Conditional concentration of Lipschitz graph statistics.

Fixing the alive set and every vertex's out-degree, the remaining randomness
is which earlier survivor each half-edge attaches to. Any L-Lipschitz
statistic then concentrates with sub-Gaussian tails 2*exp(-t^2/(8 |E| L^2)),
a non-asymptotic bound checked directly against resampling.
"""

import numpy as np

from drgvr import ModelParams, concentration_experiment

params = ModelParams(beta=1.0, eps=0.25)
n = 10**4

for stat, L in (("edge_count_in_label_range", 1), ("max_matching_greedy", 1), ("triangle_count_capped", 5)):
    rep = concentration_experiment(params, n, stat, replicas=3000, seed=11)
    print(f"{stat} (L = {L}): |E| = {rep.n_edges}, mean = {rep.mean:.2f}")
    shown = 0
    for t, emp, bound in zip(rep.t_grid, rep.empirical_tail, rep.azuma_bound):
        if shown % 6 == 0:
            print(f"   t = {t:7.2f}: empirical tail {emp:.4f}   bound {min(bound, 1.0):.4f}")
        shown += 1
    print(f"   every grid point below the bound: {rep.all_below_bound}\n")

print("the bound is extremely loose at this sparsity: the observed spread is")
print("a few units while sqrt(8 |E|) alone is",
      f"{np.sqrt(8 * rep.n_edges):.0f}; the point is that it can never be exceeded.")
