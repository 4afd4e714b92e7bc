"""How well do the tangent cuts approximate the coverage boundary?

Prints the cut family for alpha = 0.85 and the share of the miss-probability
square that the cuts accept although the exact test rejects it.
"""
from robust_cover.core import DEFAULT_BETAS
from robust_cover.linearization import build_family, excess_fraction

alpha = 0.85
family = build_family(alpha, DEFAULT_BETAS)
print(f"alpha={alpha}: {len(family.cuts)} tangent cuts plus two box cuts, box rhs ln(1-alpha) = {family.box_rhs:.5f}")
for cut in family.cuts[:5]:
    print(f"  beta={cut.beta:.3f}  tangency n={cut.delta:.5f}  ln F={cut.log_rhs:.5f}")
print("  ...")

for betas in [(0.5,), (0.1, 0.3, 0.5, 0.7, 0.9), DEFAULT_BETAS]:
    share = excess_fraction(alpha, betas, 400)
    print(f"{len(betas):2d} cuts: {100 * share:.3f}% of the square is accepted but not exactly feasible")
