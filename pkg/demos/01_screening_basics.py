"""Scoring features with the cumulative Kolmogorov filter and its baselines.

Run: python demos/01_screening_basics.py
"""
import numpy as np

from ckfscreen import Dataset, ckf_stat, screen_all, select_top
from ckfscreen.core_stats import ks_sweep, two_sample_ks

# The building block is the two-sample KS distance between ECDFs.
print(two_sample_ks([1, 3], [2, 4]))  # 0.5

# Splitting y at every distinct x value gives one KS distance per split...
sweep = ks_sweep([1, 2, 3, 4], [2, 1, 4, 3])
print(sweep.splits, sweep.values)

# ...and the CKF score averages them over the sample.
print(ckf_stat([1, 2, 3, 4], [2, 1, 4, 3]))  # 7/12

# A small screening problem: two of 300 features matter, one of them through
# a non-monotone link that kills Pearson correlation.
rng = np.random.default_rng(7)
n, p = 150, 300
x = rng.standard_normal((n, p))
y = x[:, 0] ** 2 + np.exp(x[:, 1]) + 0.3 * rng.standard_normal(n)
data = Dataset(x, y)

for method in ("ckf", "fkf", "kf", "sis", "dcs"):
    scores = screen_all(data, method)
    top = scores.ranking()[:5]
    print(f"{method:>4}: top features {top.tolist()}, rank of x1 = {int(np.flatnonzero(scores.ranking() == 0)[0]) + 1}")

# Keep the d largest scores; ties are broken towards lower indices.
selected = select_top(screen_all(data, "ckf"), 10)
print("selected:", selected.indices)
