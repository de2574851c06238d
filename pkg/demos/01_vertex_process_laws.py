"""Birth-death vertex process: count concentration and survivor-age laws.

The alive count |V_n| concentrates around 2*eps*n, the fraction of survivors
born before x*n approaches x**(p/(2 eps)), and the j-th oldest survivor sits
near n**((1-p)/p) * (j/(2 eps))**((2 eps)/p). All three are checked here by
direct simulation.
"""

import numpy as np

from drgvr import (
    ModelParams,
    expected_survivor_rank_position,
    run_vertex_process,
    survivor_age_cdf_prediction,
)

params = ModelParams(beta=1.0, eps=0.25)
n = 10**5
seeds = 40

print(f"model: beta={params.beta}, eps={params.eps} (p={params.p}), n={n}, {seeds} seeds\n")

finals = np.array([run_vertex_process(params, n, seed=s).final_count for s in range(seeds)])
print(f"alive count |V_n|/n: mean {finals.mean() / n:.5f} (limit {2 * params.eps}), "
      f"sd {finals.std() / n:.5f}")
inside = np.abs(finals - 2 * params.eps * n) <= n ** (2 / 3)
print(f"|V_n| within n^(2/3) of 2*eps*n in {inside.sum()}/{seeds} runs\n")

print("survivor-age CDF at probe points (empirical vs x**(p/2eps)):")
ledger = run_vertex_process(params, n, seed=0)
for x in (0.1, 0.25, 0.5, 0.75, 0.9):
    emp = (ledger.alive_final <= x * n).mean()
    print(f"  x={x:4}: empirical {emp:.4f}   predicted {survivor_age_cdf_prediction(params, x):.4f}")

print("\nposition of the j-th oldest survivor (median over seeds vs prediction):")
for j in (10, 100, 1000):
    positions = [int(run_vertex_process(params, n, seed=100 + s).alive_final[j - 1]) for s in range(15)]
    pred = expected_survivor_rank_position(params, j, n)
    print(f"  j={j:5}: median {np.median(positions):9.0f}   predicted {pred:9.0f}")
