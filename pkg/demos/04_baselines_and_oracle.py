"""Comparing the cross-fitted band with the plug-in rules and the exhaustive oracle.

Run: python3 demos/04_baselines_and_oracle.py
"""
from aucross import (
    LabeledSample,
    SyntheticSpec,
    generate_synthetic,
    grid_selectors,
    oracle_search,
    selective_report,
)
from aucross.trainers import score_checked

data = generate_synthetic(SyntheticSpec(5000, separation=1.5, seed=7))
train, test = data.split(3500)
grid = (0.95, 0.90, 0.80)

fitted = {}
for method in ("aucross", "plugin", "pluginauc", "scross"):
    scorer, sels = grid_selectors(train.X, train.y, method, grid, seed=7)
    fitted[method] = (LabeledSample(score_checked(scorer, test.X), test.y), sels)

print(f"{'method':10}" + "".join(f"  c={c:.2f} cov / AUC " for c in grid))
for method, (sample, sels) in fitted.items():
    cells = []
    for c in grid:
        rep = selective_report(sample, sels[c], c)
        cells.append(f"  {rep.coverage:.3f} / {rep.selective_auc:.4f}")
    print(f"{method:10}" + "".join(cells))

# The oracle peeks at the test labels, so it is an upper reference only.
sample = fitted["aucross"][0]
print(f"\n{'oracle':10}", end="")
for c in grid:
    res = oracle_search(sample, c)
    print(f"  {res.achieved_coverage:.3f} / {res.best_auc:.4f}", end="")
print(f"\n(oracle evaluated on the aucross scorer's test scores)")
