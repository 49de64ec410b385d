"""A reduced version of the synthetic study with bootstrap summaries and a report.

Run: python3 demos/05_bootstrap_study.py [output.json]
"""
import sys

from aucross import StudyConfig, run_synthetic_study, write_report_json

config = StudyConfig(seeds=(1, 2), n_train=2000, n_test=1000, B=200,
                     methods=("aucross", "pluginauc"))
result = run_synthetic_study(config)

print("method     c     seed  coverage        selective AUC     V      oracle gap")
for method in config.methods:
    for c in config.c_grid:
        for row in result.cell(method, c):
            print(
                f"{method:10} {c:.2f}  {row['seed']}    "
                f"{row['coverage_mean']:.3f} ± {row['coverage_std']:.3f}   "
                f"{row['selective_auc_mean']:.4f} ± {row['selective_auc_std']:.4f}   "
                f"{row['violation']:.3f}  {row['oracle_gap']:+.4f}"
            )

if len(sys.argv) > 1:
    write_report_json(result, sys.argv[1])
    print(f"\nreport written to {sys.argv[1]}")
