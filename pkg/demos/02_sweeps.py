"""Randomized submodularity sweeps: which measure classes violate, which never do.

Run: python3 demos/02_sweeps.py
"""

from risklattice import RiskMeasureSpec, parse_measure_spec, random_pair_sweep

SWEEPS = [
    # (spec text, atoms, trials, generator) - zero-violation classes first
    ("es:0.95", 50, 10_000, "gaussian"),
    ("es:0.9", 10, 10_000, "heavy_tail"),
    ("oce:exp:1", 10, 5_000, "gaussian"),
    ("oce:cvar:0.75", 10, 5_000, "gaussian"),
    ("eloss:poly2exp", 10, 5_000, "gaussian"),
    ("ce:exp:1", 10, 5_000, "gaussian"),
    ("shortfall:exp:1", 10, 5_000, "gaussian"),
    ("shortfall:poly2exp", 10, 5_000, "gaussian"),
    # ... and the classes with genuine violations
    ("var:0.9", 10, 10_000, "gaussian"),
    ("var:0.5", 6, 10_000, "two_point"),
    ("shortfall:expectile:1", 4, 50_000, "gaussian"),
    ("mmd:square:es:0.5", 10, 20_000, "gaussian"),
]

print(f"{'measure':<24} {'atoms':>5} {'trials':>7} {'generator':>10} "
      f"{'violations':>10} {'worst gap':>12}")
for text, atoms, trials, generator in SWEEPS:
    spec = parse_measure_spec(text)
    rep = random_pair_sweep(spec, atoms, trials, seed=7, generator=generator)
    print(f"{spec.label:<24} {atoms:>5} {trials:>7} {generator:>10} "
          f"{rep.violations:>10} {rep.worst_gap:>12.3e}")

print()
print("The expectile violation, exhibited:")
rep = random_pair_sweep(
    RiskMeasureSpec.shortfall(parse_measure_spec("shortfall:expectile:1").ell),
    4, 50_000, seed=7, generator="gaussian",
)
x, y = rep.worst_pair
print("  x =", x.round(4), "\n  y =", y.round(4), f"\n  gap = {rep.worst_gap:.6f}")
