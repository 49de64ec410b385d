"""AUC, Gini and the cumulative accuracy profile on a six-instance sample.

Run: python3 demos/01_auc_gini_cap.py
"""
import numpy as np

from aucross import LabeledSample, cap_areas, cap_points, gini, mann_whitney_auc

# Three positives and three negatives; one negative (.7) outranks a positive (.6).
sample = LabeledSample([0.9, 0.8, 0.7, 0.6, 0.5, 0.4], [1, 1, 0, 1, 0, 0])

auc = mann_whitney_auc(sample)
print(f"AUC  = {auc:.6f}   (8 of 9 positive/negative pairs ordered correctly)")
print(f"Gini = {gini(sample):.6f}   (2 * AUC - 1)")

# The CAP walks down the ranking and tracks the share of positives found so far.
print("\nCAP points (share of instances, share of positives):")
for x, y in cap_points(sample):
    print(f"  {x:.3f}  {y:.3f}")

# A lies between the CAP and the diagonal, B between the perfect model and the CAP.
areas = cap_areas(sample)
print(f"\nA = {areas.A:.6f}, B = {areas.B:.6f}, A / (A + B) = {areas.gini:.6f}")
print(f"A + B = {areas.A + areas.B:.6f} = p_neg / 2 = {sample.p_neg / 2:.6f}")

# Ties between classes earn half credit unless the strict variant is asked for.
tied = LabeledSample([0.5, 0.5, 0.7, 0.2], [1, 0, 1, 0])
print(f"\nwith a tie: AUC = {mann_whitney_auc(tied)}, strict AUC = {mann_whitney_auc(tied, strict=True)}")

# On larger data the rank-based count is fast; a quick sanity check on 10^5 rows.
rng = np.random.default_rng(0)
y = rng.integers(0, 2, 100_000)
s = 1 / (1 + np.exp(-(rng.normal(size=y.size) + y)))
print(f"AUC on 100000 rows: {mann_whitney_auc(LabeledSample(s, y)):.4f}")
