"""Joint concavity and convexity of Q(A, B) = Tr M(A, B), probed numerically.

Run with ``python3 demos/convexity.py``.
"""
import numpy as np

from matmean.channels import (midpoint_convexity_test, monotonicity_check,
                              pinching_example_defect, theory_status)
from matmean.means import MeanKind, MeanSpec

rng = np.random.default_rng(11)

# Inside the known region no midpoint violation shows up.  Outside it some
# witnesses are easy (R at p=4) and some need far more trials than this
# demo spends (G at p=1.2 typically takes tens of thousands).
for kind, alpha, p in [(MeanKind.R, 0.5, 2.0), (MeanKind.R, 0.5, 4.0),
                       (MeanKind.G, 0.5, 0.8), (MeanKind.G, 0.5, 1.2)]:
    spec = MeanSpec(kind, alpha, p)
    v = midpoint_convexity_test(spec, trials=4000, rng=rng)
    found = "none" if v.confirmed else f"violation {v.worst_violation:.2e}"
    print(f"{spec.label():>16} {v.mode.value:<10} theory={theory_status(spec):<6} {found}")

# Concavity goes together with monotonicity under channels.
r = monotonicity_check(MeanSpec(MeanKind.R, 0.5, 2.0), "cptp", 200, rng)
print(f"\nR[a=0.5,p=2] under random channels: worst defect {r.worst_defect:.2e}")

# For alpha = 2 the log-Euclidean trace is not monotone: pinching can increase it.
g = np.exp(np.linspace(-3, 3, 13))
d = max(pinching_example_defect(2.0, x, y) for x in g for y in g if x != y)
print(f"LE at alpha=2, largest increase under pinching: {d:.3f}")
