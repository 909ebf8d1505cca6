"""Serially correlated noise makes ranking quality volatile when the signal
features sit next to each other.

Compares the spread of AUC at strong positive correlation (rho = 0.99) for
two placements of the same signal magnitudes: packed together at the head of
the feature vector versus scattered uniformly.  Correlation barely moves the
mean but inflates the replicate-to-replicate spread, and grouping the
signals makes the inflation much worse - neighbouring features carry nearly
identical noise, so their scores succeed or fail together.
"""

import numpy as np

from likrank.experiments import run_correlation_experiment

REPS = 30  # desk scale; the full table uses 200

rows = {}
for placement in ("grouped_head", "randomized"):
    report = run_correlation_experiment(REPS, placement, seed=77)
    rows[placement] = report.summary

print(f"AUC over {REPS} replicates at n=100, p=4000 (mean / sd)\n")
print("  rho     grouped              randomized")
for rho in (-0.99, -0.5, 0.0, 0.5, 0.99):
    cells = {}
    for placement in rows:
        (cell,) = [s for s in rows[placement] if s["rho"] == rho and s["n"] == 100]
        cells[placement] = cell
    g, r = cells["grouped_head"], cells["randomized"]
    print(f"  {rho:+.2f}   {g['mean_auc']:.3f} / {g['sd_auc']:.3f}      "
          f"{r['mean_auc']:.3f} / {r['sd_auc']:.3f}")

print("\nBoth placements share identical labels, magnitudes, and noise per "
      "replicate\n(matched seeds), so the sd gap at rho=0.99 is the placement "
      "effect alone.")
