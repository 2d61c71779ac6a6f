"""Regenerates the small bundled datasets under data/."""
import csv
import pathlib
import random

root = pathlib.Path(__file__).resolve().parent.parent / "data"
root.mkdir(exist_ok=True)

# y = 2x + 1, no noise, 500 evenly spaced points on [-1, 1].
with open(root / "linear.csv", "w", newline="") as f:
    w = csv.writer(f, lineterminator="\n")
    w.writerow(["x", "y"])
    for i in range(500):
        x = -1.0 + 2.0 * i / 499
        w.writerow([repr(x), repr(2.0 * x + 1.0)])

# Two Gaussian blobs separated by the line x1 + x2 = 0 with a clear margin.
rng = random.Random(20240601)
rows = []
while len(rows) < 200:
    x1, x2 = rng.uniform(-3, 3), rng.uniform(-3, 3)
    s = x1 + x2
    if abs(s) < 1.0:
        continue
    rows.append((round(x1, 6), round(x2, 6), "pos" if s > 0 else "neg"))
with open(root / "separable.csv", "w", newline="") as f:
    w = csv.writer(f, lineterminator="\n")
    w.writerow(["x1", "x2", "label"])
    w.writerows(rows)
