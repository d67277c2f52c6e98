"""Photon counting reaches the quantum Cramer-Rao bound for Fock probes.

The optimal measurement after a number-state probe is plain photon counting;
the survivor count over N runs is binomial and the maximum-likelihood
estimate has a closed form. Repeating the experiment many times, the
empirical variance of the estimate lands on the bound 1/(4 n N): the
normalized variance hovers around one.
"""

import numpy as np

from lossqfi import simulate_fock_estimation

SEED = 7
print(f"{'n':>3} {'phi':>7} {'runs':>6} {'mean est.':>10} {'variance':>11} "
      f"{'bound':>11} {'normalized':>10}")
for n in (1, 2):
    for phi in (np.pi / 4, np.pi / 3):
        rep = simulate_fock_estimation(n, float(phi), 10 ** 4, 200, seed=SEED)
        print(f"{n:3d} {phi:7.4f} {rep.runs:6d} {rep.phi_hat_mean:10.5f} "
              f"{rep.empirical_variance:11.3e} {rep.crlb:11.3e} "
              f"{rep.normalized_variance:10.4f}")

# halving the variance needs doubling the runs
base = simulate_fock_estimation(1, np.pi / 4, 10 ** 4, 400, seed=SEED)
double = simulate_fock_estimation(1, np.pi / 4, 2 * 10 ** 4, 400, seed=SEED)
print(f"\nvariance ratio when N doubles: "
      f"{double.empirical_variance / base.empirical_variance:.3f} (expect 0.5)")
print("estimates are reproducible: identical seed, identical report.")
