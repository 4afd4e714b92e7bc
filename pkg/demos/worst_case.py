"""Worst-case miss probability of one demand node, three ways.

The greedy rule deviates the sites with the largest ratio
(nom + dev) / nom. Brute force and the dualised form must agree with it.
"""
import math

import numpy as np

from robust_cover.oracle import dual_value, worst_case_miss, worst_case_miss_enumerate

nom = np.array([0.05, 0.02, 0.08, 1.0, 0.03])
dev = np.array([0.05, 0.03, 0.01, 0.0, 0.06])
chosen = np.array([1, 1, 1, 0, 1])   # site 3 is out of range anyway

for gamma in range(5):
    greedy = worst_case_miss(nom, dev, chosen, gamma)
    brute = worst_case_miss_enumerate(nom, dev, chosen, gamma)
    sel = chosen.astype(bool)
    d = np.log(nom[sel] + dev[sel]) - np.log(nom[sel])
    via_dual = math.exp(np.log(nom[sel]).sum() + dual_value(d, gamma))
    print(f"Gamma={gamma}: miss {greedy.value:.3e} deviating {greedy.deviated_set}; "
          f"brute force {brute.value:.3e}, dual {via_dual:.3e}")
