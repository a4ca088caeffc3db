"""
Testing a regression for heteroscedasticity
===========================================

Fit a linear model and ask whether the error variance is constant. The
statistic is the squared coefficient of variation of the squared residuals,
centred and scaled with moments that account for the fixed design.
"""

import numpy as np

from fcvt import run_test

rng = np.random.default_rng(7)
n, p = 400, 40

# %%
# A design with many covariates relative to the sample size
X = np.column_stack([np.ones(n), rng.standard_normal((n, p - 1))])
beta = rng.standard_normal(p)

# %%
# Homoscedastic errors: the p-value should look like a uniform draw
y0 = X @ beta + rng.standard_normal(n)
rep = run_test(X, y0)
print(f"homoscedastic:   T={rep.T:.3f}  a={rep.a:.3f}  sqrt(b)={rep.b**0.5:.3f}  p={rep.p_value:.3f}")

# %%
# Errors whose spread grows with the first covariate
y1 = X @ beta + rng.standard_normal(n) * (1 + np.abs(X[:, 1]))
rep = run_test(X, y1)
print(f"heteroscedastic: T={rep.T:.3f}  a={rep.a:.3f}  sqrt(b)={rep.b**0.5:.3f}  p={rep.p_value:.2e}")

# %%
# The null centre ``a`` depends on the design through tr(P o P). A naive
# centre of 2 (the value for Gaussian errors with p fixed) would be off here.
print(f"tr(P o P) = {rep.t1:.2f} for n - p = {n - p}")

# %%
# Non-Gaussian errors change ``a`` and ``b``. Pass the profile of the
# assumed law (its moments E e^4, E e^6, E e^8). Using the Gaussian profile
# for sign errors would misplace the null centre badly.
from fcvt import GAUSSIAN, TWO_POINT

y2 = X @ beta + rng.choice([-1.0, 1.0], n)
for prof in (TWO_POINT, GAUSSIAN):
    rep2 = run_test(X, y2, prof)
    print(f"sign errors, {prof.name:9s} profile: T={rep2.T:.3f}  a={rep2.a:.3f}  p={rep2.p_value:.3g}")
