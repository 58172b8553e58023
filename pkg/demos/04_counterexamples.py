"""Constructed violating pairs, measured against their closed-form targets.

Run: python3 demos/04_counterexamples.py
"""

import numpy as np

from risklattice import (
    RiskMeasureSpec,
    aes_counterexample,
    aes_matched_grid,
    arctan_bend_loss,
    ce_counterexample,
    es_distortion,
    es_historical,
    mmd_pair_from_triple,
    shortfall_jump_deficit,
    square_weight,
    submodularity_gap,
)

print("1) Adjusted ES: ramp-and-fold pair")
a, b, q, p1 = 1.0, 0.0, 0.5, 0.25
for n in (100, 1_000, 10_000):
    x, y, predicted = aes_counterexample(a, b, q, p1, n)
    measured = es_historical(np.maximum(x, y), p1) - es_historical(x, p1)
    print(f"   atoms {n:>6}: ES_p1(join) - ES_p1(x) = {measured:.7f}  "
          f"(closed form {predicted:.7f})")
spec = RiskMeasureSpec.aes(aes_matched_grid(a, b, q, p1))
x, y, _ = aes_counterexample(a, b, q, p1, 10_000)
print(f"   {spec.label}: submodularity gap {submodularity_gap(spec, x, y).gap:+.7f}  (violated)")

print()
print("2) Shortfall with a kinked loss: 3-atom pair (-2h, -h, 0) vs constant -h")
for h in (0.1, 0.01, 0.001):
    measured, limit = shortfall_jump_deficit(1.0, 2.0, h)
    print(f"   h = {h:<6}: gap/h = {measured:.7f}   (limit {limit:+.2f})")
print("   slopes (1, 1): ", shortfall_jump_deficit(1.0, 1.0, 0.01),
      " <- no kink, no deficit")

print()
print("3) Mean-deviation with square weight: nested indicator levels")
phi = es_distortion(0.5)
x, y = mmd_pair_from_triple(phi, square_weight(), 0.6, 0.7, 0.8, 10)
res = submodularity_gap(RiskMeasureSpec.mmd(square_weight(), phi), x, y)
print(f"   x = {x.round(4)}")
print(f"   y = {y.round(4)}")
print(f"   gap = {res.gap:+.6f}  (violated: the deviations of meet and join "
      "straddle the pair's common deviation, and the square weight is strictly convex)")

print()
print("4) Certainty equivalent with a non-convex loss: two-point grid search")
ell = arctan_bend_loss()
x, y, gap = ce_counterexample(ell)
print(f"   loss {ell.name}: x = {x}, y = {y}, gap = {gap:+.4f}")
print("   (the loss is concave on gains, so the inverse fails midpoint concavity there)")
