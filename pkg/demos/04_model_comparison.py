"""A reduced model-comparison table: minimum model size to keep every informative feature.

`ckfscreen table1` runs the same thing at 200 x 1000 with 50 replications.
"""
from ckfscreen.bench_harness import min_model_size, run_table1

# 4 features score at least as high as the weakest informative one
print(min_model_size([0.9, 0.1, 0.5, 0.2], {0, 1}))

result = run_table1(models=(1, 2, 7, 8), n=200, p=300, reps=5, master_seed=11)
print(result.format_table())
