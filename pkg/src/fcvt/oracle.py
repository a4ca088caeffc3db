"""Ground-truth engines for the closed-form moments.

* :func:`enumerate_two_point` averages over all ``2^n`` sign vectors, which
  gives the exact moments of ``T1`` and ``T2`` for Rademacher errors.
* :func:`naive_omega_sum` evaluates an index sum literally, without any
  matrix algebra.
* :func:`monte_carlo_moments` estimates the same moments by simulation for
  laws that cannot be enumerated.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, PatternInvalid, TooLarge, UnknownLaw
from .streams import ERROR_PROFILES, sample_errors, stream

__all__ = [
    "ExactMoments",
    "OmegaPattern",
    "MonteCarloMoments",
    "enumerate_two_point",
    "naive_omega_sum",
    "monte_carlo_moments",
    "VAR_T1_PATTERNS",
    "MOMENT_FIELDS",
]

MAX_ENUM_N = 22
MOMENT_FIELDS = ("ET1", "ET2", "VarT1", "VarT2", "Cov")


@dataclass(frozen=True)
class ExactMoments:
    ET1: float
    ET2: float
    VarT1: float
    VarT2: float
    Cov: float

    def as_dict(self):
        return {k: getattr(self, k) for k in MOMENT_FIELDS}


def _square(A):
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {A.shape}")
    return A


def _t1_t2(E):
    sq = E * E
    s2 = sq.sum(axis=1)
    return (sq * sq).sum(axis=1), s2 * s2 / E.shape[1]


def _signs(start, stop, n):
    k = np.arange(start, stop, dtype=np.int64)
    bits = (k[:, None] >> np.arange(n, dtype=np.int64)) & 1
    return 1.0 - 2.0 * bits


def enumerate_two_point(A, symmetric: bool = True, chunk: int = 1 << 15) -> ExactMoments:
    """Exact moments of ``T1, T2`` for ``e = A xi``, ``xi`` uniform on ``{-1, 1}^n``.

    With ``symmetric=True`` only sign vectors with ``xi_n = +1`` are visited:
    ``xi`` and ``-xi`` give identical squared residuals.
    """
    A = _square(A)
    n = A.shape[0]
    if n > MAX_ENUM_N:
        raise TooLarge(f"TooLarge: enumeration needs n <= {MAX_ENUM_N}, got n={n}")
    # fixing the top bit halves the work
    total = 1 << (n - 1) if symmetric else 1 << n
    At = A.T

    def batches():
        for start in range(0, total, chunk):
            xi = _signs(start, min(start + chunk, total), n)
            yield _t1_t2(xi @ At)

    s1 = s2 = 0.0
    for t1, t2 in batches():
        s1 += t1.sum()
        s2 += t2.sum()
    m1, m2 = s1 / total, s2 / total
    v11 = v22 = v12 = 0.0
    for t1, t2 in batches():
        d1, d2 = t1 - m1, t2 - m2
        v11 += d1 @ d1
        v22 += d2 @ d2
        v12 += d1 @ d2
    return ExactMoments(m1, m2, v11 / total, v22 / total, v12 / total)


@dataclass(frozen=True)
class OmegaPattern:
    """Exponent table of an index sum.

    ``phi[tau][rho]`` is the power of ``a[i_tau, j_rho]`` in

        sum over i_1..i_t, j_1..j_s of prod a[i_tau, j_rho] ** phi[tau][rho]

    With ``restricted`` the ``j`` indices must be pairwise distinct.
    """

    phi: tuple
    restricted: bool = False

    @classmethod
    def of(cls, *rows: Sequence[int], restricted: bool = False) -> "OmegaPattern":
        return cls(tuple(tuple(int(v) for v in r) for r in rows), restricted)

    @property
    def t(self) -> int:
        return len(self.phi)

    @property
    def s(self) -> int:
        return len(self.phi[0]) if self.phi else 0

    @property
    def gamma(self) -> tuple:
        """Multiplicity of each ``i`` index."""
        return tuple(sum(r) for r in self.phi)

    @property
    def omega(self) -> tuple:
        """Multiplicity of each ``j`` index."""
        return tuple(sum(c) for c in zip(*self.phi))

    def validate(self):
        if not self.phi or any(len(r) != self.s for r in self.phi):
            raise PatternInvalid(f"ragged or empty exponent table {self.phi}")
        if not (1 <= self.t <= 2 and 1 <= self.s <= 4):
            raise PatternInvalid(f"need t <= 2 and s <= 4, got t={self.t}, s={self.s}")
        if any(v < 0 for r in self.phi for v in r):
            raise PatternInvalid(f"negative exponent in {self.phi}")
        if 0 in self.gamma or 0 in self.omega:
            raise PatternInvalid(f"every index must appear in some factor: {self.phi}")


def naive_omega_sum(A, pattern: OmegaPattern) -> float:
    """Literal evaluation of the index sum described by ``pattern``."""
    A = _square(A)
    pattern.validate()
    n = A.shape[0]
    if n > 12:
        raise TooLarge(f"TooLarge: naive sums need n <= 12, got n={n}")
    t, s = pattern.t, pattern.s
    ndim = t + s
    terms = np.ones((n,) * ndim)
    for tau, row in enumerate(pattern.phi):
        for rho, k in enumerate(row):
            if k == 0:
                continue
            shape = [1] * ndim
            shape[tau] = n
            shape[t + rho] = n
            terms = terms * (A**k).reshape(shape)
    if pattern.restricted and s > 1:
        grids = np.ix_(*[np.arange(n)] * s)
        distinct = np.ones((n,) * s, dtype=bool)
        for u, v in itertools.combinations(range(s), 2):
            distinct &= grids[u] != grids[v]
        terms = terms * distinct.reshape((1,) * t + (n,) * s)
    return float(terms.sum())


# weighted index sums in Var T1; keys match GeneralSummary fields
VAR_T1_PATTERNS = {
    "gd2": OmegaPattern.of((2, 1, 1, 0), (0, 1, 1, 2)),
    "gq2": OmegaPattern.of((1, 1, 1, 1), (1, 1, 1, 1)),
    "gm1": OmegaPattern.of((2, 1, 1), (0, 1, 3)),
    "gd2sq": OmegaPattern.of((2, 0, 2), (0, 2, 2)),
    "gq3": OmegaPattern.of((1, 1, 2), (1, 1, 2)),
    "gm4": OmegaPattern.of((3, 1), (1, 3)),
    "gq4": OmegaPattern.of((2, 2), (2, 2)),
    "gm3": OmegaPattern.of((1, 3), (1, 3)),
    "gm2": OmegaPattern.of((2, 2), (0, 4)),
    "gm5": OmegaPattern.of((4,), (4,)),
}


@dataclass(frozen=True)
class MonteCarloMoments:
    estimates: ExactMoments
    standard_errors: ExactMoments
    reps: int


def monte_carlo_moments(A, error_law: str, reps: int, seed: int) -> MonteCarloMoments:
    """Simulated moments of ``T1, T2`` for ``e = A xi`` with i.i.d. ``xi``.

    Replication ``r`` uses the stream ``(seed, r)``, so the output is a pure
    function of the arguments.
    """
    A = _square(A)
    if error_law not in ERROR_PROFILES:
        raise UnknownLaw(f"unknown error law {error_law!r}; choose from {sorted(ERROR_PROFILES)}")
    reps = int(reps)
    if reps < 1000:
        raise ValueError(f"need reps >= 1000, got {reps}")
    n = A.shape[0]
    xi = np.empty((reps, n))
    for r in range(reps):
        xi[r] = sample_errors(error_law, n, stream(seed, r))
    t1, t2 = _t1_t2(xi @ A.T)
    m1, m2 = t1.mean(), t2.mean()
    d1, d2 = t1 - m1, t2 - m2
    v11, v22, v12 = (d1 * d1).mean(), (d2 * d2).mean(), (d1 * d2).mean()
    est = ExactMoments(m1, m2, v11, v22, v12)
    se = ExactMoments(
        np.sqrt(v11 / reps),
        np.sqrt(v22 / reps),
        np.sqrt(np.var(d1 * d1) / reps),
        np.sqrt(np.var(d2 * d2) / reps),
        np.sqrt(np.var(d1 * d2) / reps),
    )
    return MonteCarloMoments(est, se, reps)
