"""Weighted means of two PSD matrices and how they compare.

Run with ``python3 demos/means_and_orders.py``.
"""
import numpy as np

from matmean.highprec import log_margin_mp
from matmean.majorization import log_majorize
from matmean.means import MeanKind, mean_value
from matmean.relations import claim_by_id, counterexample_search, verify_claim
from matmean.spectral import sample_psd

rng = np.random.default_rng(7)
a = sample_psd(3, rng, condition_target=20.0)
b = sample_psd(3, rng, condition_target=20.0)
alpha = 0.4

# Every quasi-geometric mean has the same determinant, so they can only
# differ in how that determinant is spread across eigenvalues.
print("eigenvalues at alpha = 0.4, p = 1")
for kind in (MeanKind.R, MeanKind.G, MeanKind.LE, MeanKind.SG, MeanKind.SGT):
    w = np.linalg.eigvalsh(mean_value(kind, alpha, 1.0, a, b))[::-1]
    print(f"  {kind.value:>3}: {np.round(w, 6)}  det={np.prod(w):.6f}")

# The Rényi mean grows in log-majorization with its exponent.
x = mean_value(MeanKind.R, alpha, 1.0, a, b)
y = mean_value(MeanKind.R, alpha, 2.0, a, b)
v = log_majorize(x, y)
print(f"\nR_1 vs R_2: {v.outcome.value}, margin {v.margin:.3e}")

# Catalog claims are checked by sampling (sufficient conditions) or by a
# witness search confirmed at high precision (counterexample claims).
for cid in ("Thm3.1a", "Thm3.4.2"):
    r = verify_claim(claim_by_id(cid), 100, rng, n_max=3)
    print(f"{cid:>9}: {r.status.value}, worst margin {r.worst_margin:.3e}")

# Outside its condition the relation SG_p ≺ R_q breaks on some pair.
w = counterexample_search("SG", "R", 0.3, 1.0, 1.0, rng, budget=100)
print(f"\nSG_1 vs R_1 at alpha=0.3: witness from {w.source} search, margin {w.margin:.3e}")

# SG ≺ LE for alpha > 1 is not settled by any stated result; this pair
# shows it fails.
a0 = np.diag([1.0, 1e-8])
b0 = np.array([[0.91354113, 0.27949802], [0.27949802, 0.09645887]])
m = log_margin_mp("SG", "LE", 1.25, 1.0, 1.0, a0, b0, dps=60)
print(f"SG vs LE at alpha=1.25 on a fixed 2x2 pair: margin {m:.3f} (negative means violated)")
