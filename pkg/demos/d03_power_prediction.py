"""
Predicting the statistic under an alternative
=============================================

For known error scales ``sigma`` the first-order mean of ``T`` is
``E T1 / E T2 - 1``. Half the observations with unit scale and half with
scale 2 push it from about 2 to about 3.08 in an intercept-only model.
"""

import numpy as np

from fcvt import GAUSSIAN, general_functionals, general_moments, null_moments, projection_functionals, projection_matrix

for n in (100, 500, 2000):
    pm = projection_matrix(np.ones((n, 1)))
    a = null_moments(projection_functionals(pm, cumulant_terms=False), GAUSSIAN).a
    sigma = np.where(np.arange(n) < n // 2, 1.0, 2.0)
    mean_T = general_moments(general_functionals(pm, sigma), GAUSSIAN).predicted_mean_T
    print(f"n={n:5d}  null mean a={a:.4f}  predicted mean under half-1/half-2: {mean_T:.4f}")

# %%
# Compare with simulation at moderate n
from fcvt import ols_fit, statistic_T

rng = np.random.default_rng(3)
n = 500
X = rng.standard_normal((n, 10))
sigma = np.where(np.arange(n) < n // 2, 1.0, 2.0)
pred = general_moments(general_functionals(projection_matrix(X), sigma), GAUSSIAN).predicted_mean_T
Ts = [statistic_T(ols_fit(X, rng.standard_normal(n) * sigma)[1]) for _ in range(2000)]
print(f"n=500, p=10: predicted {pred:.3f}, simulated {np.mean(Ts):.3f} +/- {np.std(Ts) / np.sqrt(2000):.3f}")
