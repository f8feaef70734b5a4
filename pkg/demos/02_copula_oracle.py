"""Population values of the split statistic under a Gaussian copula.

For a jointly normal pair with correlation rho, the KS distance between
Y | X <= x and Y | X > x has a one-dimensional integral form.  Averaging it
over x gives the population target of the CKF score.
"""
import math

import numpy as np

from ckfscreen import ckf_stat
from ckfscreen.copula_oracle import check_grid, lemma_kj, lemma_kj_drho, population_K

# At x = 0 the value reduces to an orthant probability: 2 asin(rho) / pi.
for rho in (0.2, 0.5, 0.9):
    print(rho, lemma_kj(rho, 0.0), 2 * math.asin(rho) / math.pi)

# The closed-form rho-derivative against a central difference.
rho, x, h = 0.4, 1.0, 1e-5
print(lemma_kj_drho(rho, x), (lemma_kj(rho + h, x) - lemma_kj(rho - h, x)) / (2 * h))

# The same checks that `ckfscreen lemma-check` runs.
print("grid ok:", check_grid().ok)

# The sample score is biased upwards by roughly 1/sqrt(n) and converges to K(rho).
rng = np.random.default_rng(0)
target = population_K(0.5)
for n in (100, 400, 1600, 6400):
    x = rng.standard_normal(n)
    y = 0.5 * x + math.sqrt(0.75) * rng.standard_normal(n)
    print(f"n={n:5d}  K_hat={ckf_stat(x, y):.4f}  K={target:.4f}")
