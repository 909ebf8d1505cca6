"""Ranking quality barely moves with the sample size when the signal shifts
shrink like 1/sqrt(n).

A desk-scale version of the stability sweep (the full 200-replicate run
lives behind ``likrank experiment stability``): AUC stays flat across n for
each signal strength c0, while larger c0 lifts the whole curve.
"""

from likrank.experiments import run_stability_experiment

REPS = 25  # keep the demo quick; bump for smoother numbers

report = run_stability_experiment(reps=REPS, seed=2024)

print(f"mean AUC over {REPS} replicates (fixed-magnitude signals)\n")
header = "  c0    " + "".join(f"n={n:<7}" for n in (20, 50, 100, 200))
print(header)
for c0 in (0.4, 0.8, 1.2, 1.6):
    cells = [s for s in report.summary
             if s["magnitude"] == "fixed" and s["c0"] == c0]
    row = "".join(f"{s['mean_auc']:.3f}    " for s in sorted(cells, key=lambda s: s["n"]))
    print(f"  {c0}   {row}")

print("\nsame sweep with magnitudes drawn uniformly from [0, c0*sqrt(20/n)]\n")
print(header)
for c0 in (0.4, 0.8, 1.2, 1.6):
    cells = [s for s in report.summary
             if s["magnitude"] == "uniform" and s["c0"] == c0]
    row = "".join(f"{s['mean_auc']:.3f}    " for s in sorted(cells, key=lambda s: s["n"]))
    print(f"  {c0}   {row}")

print("\nEach row is nearly constant: the ranking neither gains nor loses "
      "accuracy\nas n grows, because the per-feature evidence stays fixed by "
      "construction.")
