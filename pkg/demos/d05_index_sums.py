"""
Index sums and their matrix forms
=================================

``Var T1`` is a weighted sum of ten index sums over the entries of
``A = P diag(sigma)``. Each sum has a matrix expression costing at most a few
``n x n`` products. Evaluating the sums literally on a small matrix checks
those expressions entry by entry.

One commonly written form is wrong: the sum with exponent table
``(3,1),(1,3)`` is ``tr(K^2)`` with ``K = A^{o3} A'``, not the squared
Frobenius norm of ``K``. ``K`` is not symmetric, even for a projection.
"""

import numpy as np

from fcvt import general_functionals, naive_omega_sum
from fcvt.oracle import VAR_T1_PATTERNS

rng = np.random.default_rng(0)
n = 7
A = rng.standard_normal((n, n))
g = general_functionals(A, np.ones(n), p=0)

for field, pattern in VAR_T1_PATTERNS.items():
    naive = naive_omega_sum(A, pattern)
    print(f"{field:6s} {str(pattern.phi):32s} literal {naive:14.6f}  matrix {getattr(g, field):14.6f}")

K = A**3 @ A.T
print(f"\ntr(K^2) = {np.trace(K @ K):.6f}   ||K||_F^2 = {np.sum(K * K):.6f}")
