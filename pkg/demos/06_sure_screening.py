"""How often the top 10 CKF features contain both informative ones, as n grows."""
from ckfscreen.bench_harness import sure_screening_experiment

for pt in sure_screening_experiment(n_grid=(25, 50, 100, 200), p=200, reps=100):
    print(f"n={pt.n:4d}  P={pt.probability:.2f}  (se {pt.se:.3f})  bound eta={pt.bound_eta:.3g}")
# The explicit probability bound is far above 1 at these sizes; only the trend is informative.
