"""The homoscedasticity test: statistic, standardisation and p-value."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .design import design_matrix, ols_fit, projection_functionals, projection_matrix
from .errors import DegenerateResiduals, DimensionMismatch
from .moments import GAUSSIAN, ErrorMomentProfile, null_moments

__all__ = ["TestReport", "statistic_T", "normal_sf", "run_test", "report_from_residuals"]


@dataclass(frozen=True)
class TestReport:
    """Outcome of one test.

    ``p_value`` is the upper-tail probability unless ``two_sided`` is set.
    ``t1`` is the diagnostic ``tr(P o P)``.
    """

    __test__ = False  # keep pytest from collecting this class

    T: float
    a: float
    b: float
    z: float
    p_value: float
    n: int
    p: int
    t1: float
    profile_name: str
    profile: ErrorMomentProfile
    two_sided: bool = False

    def reject(self, alpha: float = 0.05) -> bool:
        return self.p_value < alpha

    def to_dict(self, alpha: float = 0.05) -> dict:
        """JSON-ready mapping in the ``fcvt test`` output schema."""
        prof = self.profile
        return {
            "n": self.n,
            "p": self.p,
            "T": self.T,
            "a": self.a,
            "b": self.b,
            "z": self.z,
            "p_value": self.p_value,
            "reject": self.reject(alpha),
            "alpha": alpha,
            "profile": {"M4": prof.M4, "M6": prof.M6, "M8": prof.M8},
            "tr_P_hadamard": self.t1,
        }


def statistic_T(residuals) -> float:
    """Coefficient-of-variation statistic of the squared residuals.

    ``T = sum_i (e_i^2 - m)^2 / (n^{-1} (sum_i e_i^2)^2)`` with ``m`` the
    mean of ``e_i^2``. Equivalently ``T1/T2 - 1``.
    """
    e = np.asarray(residuals, dtype=np.float64)
    if e.ndim != 1 or e.size < 2:
        raise DimensionMismatch("need a 1-d residual vector with n >= 2")
    n = e.size
    # scale first so e^4 cannot overflow and T is exactly scale free
    scale = np.abs(e).max()
    if scale == 0 or not math.isfinite(scale):
        raise DegenerateResiduals("DegenerateResiduals: all residuals are zero")
    sq = (e / scale) ** 2
    m = sq.mean()
    return float(np.sum((sq - m) ** 2) / (n * m * m))


def normal_sf(z: float) -> float:
    """Standard normal upper tail ``1 - Phi(z)`` through ``erfc``."""
    return float(0.5 * special.erfc(z / math.sqrt(2.0)))


def _p_value(z, two_sided):
    if two_sided:
        return min(1.0, 2.0 * normal_sf(abs(z)))
    return normal_sf(z)


def report_from_residuals(residuals, summary, profile: ErrorMomentProfile = GAUSSIAN,
                          two_sided: bool = False) -> TestReport:
    """Standardise ``T`` of given residuals with precomputed functionals."""
    T = statistic_T(residuals)
    nm = null_moments(summary, profile)
    z = (T - nm.a) / math.sqrt(nm.b)
    return TestReport(
        T=T, a=nm.a, b=nm.b, z=z, p_value=_p_value(z, two_sided),
        n=summary.n, p=summary.p, t1=summary.t1,
        profile_name=profile.name, profile=profile, two_sided=two_sided,
    )


def run_test(X, y, profile: ErrorMomentProfile = GAUSSIAN, two_sided: bool = False) -> TestReport:
    """Fit OLS of ``y`` on ``X`` and test the residuals for heteroscedasticity.

    Large values of ``T`` indicate heteroscedasticity, so by default the
    p-value is the upper tail of the normal limit.

    Raises
    ------
    RankDeficient, NonPositiveVariance, DegenerateResiduals
    """
    dm = design_matrix(X)
    y = np.asarray(y, dtype=np.float64)
    _, resid = ols_fit(dm, y)
    # an exact fit leaves rounding noise only
    if np.linalg.norm(resid) <= 1e-10 * np.linalg.norm(y):
        raise DegenerateResiduals("DegenerateResiduals: y lies in the column space of X")
    pm = projection_matrix(dm)
    summary = projection_functionals(pm, cumulant_terms=not profile.is_gaussian)
    return report_from_residuals(resid, summary, profile, two_sided)

