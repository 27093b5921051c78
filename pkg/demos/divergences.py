"""Rényi-type divergences generated by the means.

Run with ``python3 demos/divergences.py``.
"""
import numpy as np

from matmean.divergences import all_orderings, regularized_measured_estimate, sandwiched
from matmean.spectral import sample_psd


def state(n, rng):
    x = sample_psd(n, rng, condition_target=20.0)
    return x / np.trace(x).real


rng = np.random.default_rng(3)
rho, sigma = state(2, rng), state(2, rng)

# D(rho || sigma): measured <= sandwiched <= alpha-z / Petz <= maximal.
for alpha in (0.6, 1.5):
    d = all_orderings(alpha, sigma, rho)
    print(f"alpha = {alpha}")
    for name, val in sorted(d.items(), key=lambda kv: kv[1]):
        print(f"  {name:>16}: {val:.6f}")

# Pinching the m-fold tensor power closes the gap to the Umegaki value at a
# rate bounded by log(m + 1) / m.
s = sandwiched(sigma, rho, 1.0).value
print(f"\nUmegaki relative entropy: {s:.6f}")
for m in range(1, 5):
    e = regularized_measured_estimate(sigma, rho, 1.0, m)
    print(f"  m={m}: {e:.6f}  gap {s - e:.4f}  bound {np.log(m + 1) / m:.4f}")
