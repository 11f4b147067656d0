"""Writes data/demo_cohorts.csv: a synthetic table with three latent cohorts.

Cohort membership drives some features strongly, some weakly, and some not
at all, so feature pairs disagree in interesting ways. Fully deterministic.
"""
import csv
import pathlib

import numpy as np

rng = np.random.default_rng(7)
n_per = [60, 50, 40]
cohort = np.repeat([0, 1, 2], n_per)
n = cohort.size

centers = {
    "pitch_mean": [120.0, 180.0, 220.0],
    "pitch_min": [90.0, 140.0, 170.0],
    "jitter": [0.004, 0.006, 0.011],
    "shimmer": [0.02, 0.03, 0.05],
    "hnr": [24.0, 21.0, 16.0],
    "dfa": [0.70, 0.72, 0.80],
}
spread = {
    "pitch_mean": 10.0, "pitch_min": 12.0, "jitter": 0.0012, "shimmer": 0.006,
    "hnr": 2.0, "dfa": 0.02,
}

rows = {"subject": [f"S{i:03d}" for i in range(n)]}
for name, c in centers.items():
    rows[name] = np.array(c)[cohort] + rng.normal(0.0, spread[name], n)
rows["noise_a"] = rng.normal(0.0, 1.0, n)
rows["noise_b"] = rng.uniform(0.0, 10.0, n)
rows["affected"] = (cohort == 2).astype(int)

out = pathlib.Path(__file__).resolve().parent.parent / "data" / "demo_cohorts.csv"
with out.open("w", newline="") as fh:
    w = csv.writer(fh)
    names = list(rows)
    w.writerow(names)
    for i in range(n):
        w.writerow([rows[k][i] if k == "subject" else f"{rows[k][i]:.6g}" for k in names])
print(f"wrote {out} ({n} rows)")
