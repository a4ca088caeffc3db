"""Closed-form moments of ``T1 = sum e_i^4`` and ``T2 = (sum e_i^2)^2 / n``.

The residual vector is ``e = A xi`` with ``A = P diag(sigma)`` and ``xi`` a
vector of i.i.d. standardised symmetric errors. Everything here is expressed
through the trace functionals of :mod:`fcvt.design` and the cumulants
``nu4, nu6, nu8`` of the error law.

``E T1``, ``E T2`` and ``Var T1`` are exact for every ``n``. ``Var T2`` and
``Cov(T1, T2)`` are the leading O(n) terms; the O(1) remainder is dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .design import GeneralSummary, ProjectionSummary
from .errors import InvalidMomentSequence, NonPositiveVariance, ZeroDenominator

__all__ = [
    "ErrorMomentProfile",
    "NullMoments",
    "GeneralMoments",
    "GAUSSIAN",
    "TWO_POINT",
    "UNIFORM",
    "LAPLACE",
    "cumulants_from_moments",
    "null_moments",
    "general_moments",
    "delta_method_variance",
    "var_t1_terms",
]


@dataclass(frozen=True)
class ErrorMomentProfile:
    """Even moments of a unit-variance symmetric error law and its cumulants."""

    M4: float
    M6: float
    M8: float
    nu4: float
    nu6: float
    nu8: float
    name: str = "custom"

    @property
    def is_gaussian(self) -> bool:
        return self.nu4 == 0 and self.nu6 == 0 and self.nu8 == 0


def cumulants_from_moments(M4: float, M6: float, M8: float, name: str = "custom") -> ErrorMomentProfile:
    """Build a profile from ``E xi^4, E xi^6, E xi^8`` (with ``E xi^2 = 1``).

    Raises
    ------
    InvalidMomentSequence
        If the moments cannot belong to a unit-variance law.
    """
    M4, M6, M8 = float(M4), float(M6), float(M8)
    if not all(math.isfinite(v) for v in (M4, M6, M8)):
        raise InvalidMomentSequence("moments must be finite")
    if M4 < 1:
        raise InvalidMomentSequence(f"M4 >= 1 violated (M4={M4})")
    if M6 * M6 < M4**3:
        raise InvalidMomentSequence(f"M6^2 >= M4^3 violated (M4={M4}, M6={M6})")
    if M8 < M4 * M4:
        raise InvalidMomentSequence(f"M8 >= M4^2 violated (M4={M4}, M8={M8})")
    nu4 = M4 - 3.0
    nu6 = M6 - 15.0 * M4 + 30.0
    nu8 = M8 - 28.0 * M6 - 35.0 * M4 * M4 + 420.0 * M4 - 630.0
    return ErrorMomentProfile(M4, M6, M8, nu4, nu6, nu8, name)


GAUSSIAN = cumulants_from_moments(3.0, 15.0, 105.0, "gaussian")
TWO_POINT = cumulants_from_moments(1.0, 1.0, 1.0, "two_point")
# uniform on [-sqrt(3), sqrt(3)]
UNIFORM = cumulants_from_moments(9.0 / 5.0, 27.0 / 7.0, 9.0, "uniform")
# Laplace with scale 1/sqrt(2)
LAPLACE = cumulants_from_moments(6.0, 90.0, 2520.0, "laplace")


@dataclass(frozen=True)
class NullMoments:
    """Asymptotic mean ``a`` and variance ``b`` of ``T`` under homoscedasticity."""

    a: float
    b: float
    theta: np.ndarray
    delta: np.ndarray
    ET1: float
    ET2: float


@dataclass(frozen=True)
class GeneralMoments:
    ET1: float
    ET2: float
    VarT1: float
    VarT2_leading: float
    Cov_leading: float
    predicted_mean_T: float


def delta_method_variance(ET1: float, ET2: float, theta) -> float:
    """First-order variance of ``T1/T2 - 1`` given ``Cov((T1, T2)) = theta``."""
    if ET2 == 0:
        raise ZeroDenominator("E T2 must be nonzero")
    grad = np.array([1.0 / ET2, -ET1 / ET2**2])
    theta = np.asarray(theta, dtype=np.float64)
    return float(grad @ theta @ grad)


def _require(summary, names, profile):
    missing = [f for f in names if getattr(summary, f) is None]
    if missing:
        raise ValueError(
            f"profile {profile.name!r} needs cumulant functionals {missing}; "
            "build the summary with cumulant_terms=True"
        )


def null_moments(summary: ProjectionSummary, profile: ErrorMomentProfile, n: int | None = None,
                 p: int | None = None) -> NullMoments:
    """Mean ``a`` and variance ``b = Delta' Theta Delta`` of ``T`` under H0.

    Raises
    ------
    NonPositiveVariance
        If ``b <= 0``; happens when ``p`` is too close to ``n``.
    """
    n = summary.n if n is None else int(n)
    p = summary.p if p is None else int(p)
    if (n, p) != (summary.n, summary.p):
        raise ValueError(f"summary is for (n, p)=({summary.n}, {summary.p}), got ({n}, {p})")
    nu4, nu6, nu8 = profile.nu4, profile.nu6, profile.nu8
    s = summary
    r = float(n - p)

    num = 3.0 * s.t1 + nu4 * s.q2
    den = r * r + 2.0 * r + nu4 * s.t1
    ET1 = num
    ET2 = den / n
    a = n * num / den - 1.0

    th11 = 72.0 * s.d2 + 24.0 * s.q2
    th12 = 24.0 * s.t1
    if nu4 != 0:
        _require(s, ("m1", "q3", "d2sq", "q4", "m4", "c2"), profile)
        th11 += nu4 * (96.0 * s.m1 + 72.0 * s.q3 + 36.0 * s.d2sq)
        th11 += nu4 * nu4 * (18.0 * s.q4 + 16.0 * s.m4)
        th12 += 16.0 * nu4 * s.c1 + 12.0 * nu4 * s.c2
    if nu6 != 0:
        _require(s, ("m2", "m3"), profile)
        th11 += nu6 * (12.0 * s.m2 + 16.0 * s.m3)
        th12 += 2.0 * nu6 * s.c3
    th11 += nu8 * s.m5
    th12 *= r / n
    th22 = (8.0 * r**3 + 4.0 * nu4 * r * r * s.t1) / n**2

    theta = np.array([[th11, th12], [th12, th22]])
    delta = np.array([n / den, -n * n * num / den**2])
    b = float(delta @ theta @ delta)
    if not b > 0:
        raise NonPositiveVariance(f"NonPositiveVariance: null variance b={b:.6g} <= 0 (n={n}, p={p})")
    return NullMoments(a=a, b=b, theta=theta, delta=delta, ET1=ET1, ET2=ET2)


def var_t1_terms(g: GeneralSummary, profile: ErrorMomentProfile) -> dict:
    """The ten weighted contributions to ``Var T1``, keyed by field name."""
    nu4, nu6, nu8 = profile.nu4, profile.nu6, profile.nu8
    return {
        "gd2": 72.0 * g.gd2,
        "gq2": 24.0 * g.gq2,
        "gm1": 96.0 * nu4 * g.gm1,
        "gd2sq": 36.0 * nu4 * g.gd2sq,
        "gq3": 72.0 * nu4 * g.gq3,
        "gm4": 16.0 * nu4 * nu4 * g.gm4,
        "gq4": 18.0 * nu4 * nu4 * g.gq4,
        "gm3": 16.0 * nu6 * g.gm3,
        "gm2": 12.0 * nu6 * g.gm2,
        "gm5": nu8 * g.gm5,
    }


def general_moments(g: GeneralSummary, profile: ErrorMomentProfile, n: int | None = None) -> GeneralMoments:
    """Moments of ``T1`` and ``T2`` for arbitrary error scales.

    Meant for power prediction. ``VarT2_leading`` and ``Cov_leading`` omit an
    O(1) remainder and should not be used to calibrate a test.
    """
    n = g.n if n is None else int(n)
    nu4, nu6 = profile.nu4, profile.nu6
    ET1 = 3.0 * g.tBB + nu4 * g.sA4
    ET2 = (g.trB**2 + 2.0 * g.trB2 + nu4 * g.tCC) / n
    VarT1 = sum(var_t1_terms(g, profile).values())
    VarT2 = (8.0 * g.trB**2 * g.trB2 + 4.0 * nu4 * g.tCC * g.trB**2) / n**2
    Cov = g.trB / n * (24.0 * g.gc0 + 16.0 * nu4 * g.gc1 + 12.0 * nu4 * g.gc2 + 2.0 * nu6 * g.gc3)
    vals = (ET1, ET2, VarT1, VarT2, Cov)
    if not all(math.isfinite(v) for v in vals):
        raise ArithmeticError("non-finite moment")
    return GeneralMoments(ET1, ET2, VarT1, VarT2, Cov, ET1 / ET2 - 1.0)
