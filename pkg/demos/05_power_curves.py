"""Power of single-covariate tests built from the three Kolmogorov filters.

Toy model Y = beta X + eps.  Printed as a text table; the CSV written by
`ckfscreen power` is ready for any plotting tool.
"""
from ckfscreen.bench_harness import power_study

pts = power_study(beta_grid=(0.0, 0.1, 0.2, 0.3, 0.4), n=100, reps=1000, null_reps=3000)
curves = {}
for pt in pts:
    curves.setdefault(pt.beta, {})[pt.method] = pt.power
print(" beta    ckf    fkf     kf")
for beta, row in sorted(curves.items()):
    print(f"{beta:5.2f} {row['ckf']:6.3f} {row['fkf']:6.3f} {row['kf']:6.3f}")
