"""Tour of every risk functional on one small sample, with cross-checks.

Run: python3 demos/01_measures_tour.py
"""

import numpy as np

import risklattice as rl

losses = np.array([0.05, 0.01, -0.02, 0.03, -0.01])
print("sample losses:", losses, " (positive = loss, 5 equal-weight atoms)")
print()

# Order-statistic measures.  k = ceil(n (1-p)) largest losses enter.
for p in (0.8, 0.6):
    print(f"VaR({p})  = {rl.var_historical(losses, p):+.4f}   "
          f"ES({p}) = {rl.es_historical(losses, p):+.4f}")

# Adjusted ES: best penalized level wins.
grid = rl.AdjustmentGrid(levels=(0.6, 0.8), penalties=(0.0, 0.005))
print(f"AES over {grid.levels} with penalties {grid.penalties}: "
      f"{rl.aes(losses, grid):+.4f}  (= max(0.04, 0.05 - 0.005))")

# The ES distortion gives back ES exactly: same functional, different route.
phi = rl.es_distortion(0.6)
print(f"Choquet with ES(0.6) distortion = {rl.distortion_rho(losses, phi):+.4f} "
      f"== ES(0.6) = {rl.es_historical(losses, 0.6):+.4f}")

# Identity distortion is the plain mean.
print(f"Choquet with identity distortion = "
      f"{rl.distortion_rho(losses, rl.identity_distortion()):+.4f} == mean = {losses.mean():+.4f}")
print()

# Expected loss, certainty equivalent, shortfall: three uses of one loss fn.
ell = rl.exponential_loss(1.0)
print(f"expected exp-loss        = {rl.expected_loss(losses, ell):+.6f}")
print(f"certainty equivalent     = {rl.certainty_equivalent(losses, ell):+.6f}")
print(f"shortfall (implicit eq.) = {rl.shortfall_rho(losses, ell):+.6f}   "
      "<- equal: the exponential shortfall IS a certainty equivalent")

# The positive-part loss turns the optimized certainty equivalent into ES.
print(f"OCE with cvar:0.75 loss on [1,2,3,4] = {rl.oce([1, 2, 3, 4], rl.cvar_loss(0.75)):.4f} "
      f"== ES(0.75) = {rl.es_historical([1, 2, 3, 4], 0.75):.4f}")

# Mean-deviation: reweight the spread between a coherent measure and the mean.
val = rl.mmd_rho(losses, rl.square_weight(), phi)
print(f"mean-deviation with square weight = {val:+.6f} "
      f"(= (0.04 - 0.012)^2 + 0.012)")
print()

# Cash invariance and positive homogeneity, spot-checked.
c, lam = 0.01, 3.0
print("cash invariance:  shortfall(x + c) - shortfall(x) =",
      f"{rl.shortfall_rho(losses + c, ell) - rl.shortfall_rho(losses, ell):+.6f} (c = {c})")
print("homogeneity:      ES(lam x) / ES(x) =",
      f"{rl.es_historical(lam * losses, 0.6) / rl.es_historical(losses, 0.6):.6f} (lam = {lam})")
