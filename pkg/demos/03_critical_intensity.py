"""Critical attachment intensity beta_c(p) from the kernel operator.

The giant component appears once the norm of the kernel operator
f -> integral of beta * max(x,y)**(-(2p-1)/p) f(y) dy crosses 1. Closed-form
bounds sandwich beta_c; the discretized operator pins it down numerically.
At p = 1 the threshold is exactly 1/4; as p -> 1/2 it climbs to 1.
"""

import numpy as np

from drgvr import ModelParams, figure1_table, operator_norm, survival_gamma

print("p      lower    upper_opt  upper_simple  empirical")
for row in figure1_table(np.linspace(0.55, 1.0, 10), m=1024):
    print(f"{row['p']:.2f}   {row['lower']:.4f}   {row['upper_opt']:.4f}     "
          f"{row['upper_simple']:.4f}        {row['empirical']:.4f}")

params = ModelParams(beta=1.0, eps=0.25)
norm = operator_norm(params, m=1024)
gamma = survival_gamma(params, m=1024)
print(f"\nat beta=1, p=0.75: operator norm = {norm:.4f} (> 1, supercritical)")
print(f"branching survival probability gamma = {gamma:.4f}")
print(f"predicted giant fraction of all steps: 2*eps*gamma = {2 * params.eps * gamma:.4f}")
for beta in (0.3, 0.55, 0.7, 1.5):
    g = survival_gamma(ModelParams(beta, 0.25), m=512)
    print(f"  beta={beta:4}: gamma = {g:.4f}")
