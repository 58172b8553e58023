"""Curvature profiles and dominance verdicts for the built-in shortfall losses.

The shortfall measure built from a smooth strictly increasing convex loss is
submodular exactly when some multiplier lambda dominates
h(x) = l'(x) (R(x) - 2L) by lambda * l(x), with R = l''/l' and L = min R.
This demo evaluates that check on a grid for each named loss and then
confirms the verdicts with sweeps.

Run: python3 demos/03_shortfall_curvature.py
"""

from risklattice import (
    RiskMeasureSpec,
    curvature_profile,
    linear_dominance_check,
    parse_loss_spec,
    random_pair_sweep,
)

LOSSES = ["exp:1", "exp:3", "poly2exp", "linear", "expectile:1", "piecewise:1,2"]

print(f"{'loss':<15} {'R range on grid':<28} {'suff.':>6} {'feasible':>9}  lambda interval")
verdicts = {}
for text in LOSSES:
    ell = parse_loss_spec(text)
    prof = curvature_profile(ell, lo=-20.0, hi=20.0, step=1e-2)
    v = linear_dominance_check(prof, ell)
    verdicts[text] = v
    r_lo, r_hi = prof.R_values.min(), prof.R_values.max()
    interval = (f"[{v.alpha_plus:.3g}, {v.alpha_minus:.3g}]" if v.feasible
                else f"witnesses at {[round(w, 3) for w in v.witnesses]}")
    print(f"{text:<15} [{r_lo:>10.4g}, {r_hi:>10.4g}] "
          f"{'yes' if v.sufficient_condition_holds else 'no':>6} "
          f"{'yes' if v.feasible else 'no':>9}  {interval}")

print()
print("Sweeps agree with the verdicts (5k trials, 10 atoms; expectile at 4 atoms):")
for text in ("exp:1", "poly2exp", "expectile:1"):
    ell = parse_loss_spec(text)
    atoms = 4 if text.startswith("expectile") else 10
    trials = 50_000 if text.startswith("expectile") else 5_000
    rep = random_pair_sweep(RiskMeasureSpec.shortfall(ell), atoms, trials, seed=3)
    print(f"  shortfall({text}): feasible={verdicts[text].feasible}, "
          f"violations={rep.violations}/{trials}")
