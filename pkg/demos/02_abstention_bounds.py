"""Which instances can be dropped without hurting AUC, and the bounds that capture them.

Run: python3 demos/02_abstention_bounds.py
"""

import numpy as np

from aucross import (
    LabeledSample,
    RankProfile,
    ScoreBandSelector,
    apply_selector,
    auc_fraction,
    estimate_thetas_auc,
    removable_negative,
    removable_positive,
)

sample = LabeledSample(
    [0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1, 0.05],
    [1, 0, 1, 0, 1, 0, 1, 0, 0, 0],
)
auc = auc_fraction(sample)
prof = RankProfile(sample)
print(f"AUC = {auc} = {float(auc)}")

# Low-ranked positives and high-ranked negatives are the ones that pull AUC down.
print("\nscore label  droppable  AUC after dropping it alone")
for i in range(sample.n):
    check = removable_positive if sample.labels[i] == 1 else removable_negative
    flag = check(sample, prof, i, auc)
    rest = sample.take(np.delete(np.arange(sample.n), i))
    print(f"{sample.scores[i]:5.2f}   {sample.labels[i]}     {str(flag):5}      {float(auc_fraction(rest)):.4f}")

# The bounds summarize the conditions: positives at or below theta_u and
# negatives at or above theta_l qualify.
th = estimate_thetas_auc(sample)
print(f"\ntheta_l = {th.theta_l}, theta_u = {th.theta_u}")

# When theta_l <= theta_u the band between them can be rejected as a whole.
# Here a stray positive sits among the negatives and the band isolates it.
planted = LabeledSample(
    np.round(np.linspace(0.94, 0.06, 16), 3),
    [1, 1, 1, 1, 1, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0],
)
th = estimate_thetas_auc(planted)
band = ScoreBandSelector(th.theta_l, th.theta_u)
kept, coverage = apply_selector(planted, band)
print(f"\nplanted sample: theta_l = {th.theta_l}, theta_u = {th.theta_u}, band empty: {band.is_empty}")
print(f"AUC {float(auc_fraction(planted)):.4f} -> {float(auc_fraction(kept)):.4f} at coverage {coverage:.3f}")
