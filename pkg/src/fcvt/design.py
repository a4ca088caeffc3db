"""Dense linear algebra for a fixed regression design.

OLS fitting through a Householder QR factorisation, the residual-maker
projection ``P = I - X (X'X)^{-1} X'`` and the scalar trace functionals of
``P`` (and of ``A = P diag(sigma)``) that enter the moments of the test
statistic.

Conventions
-----------
``tr(M o N)`` is the trace of the Hadamard product, i.e. ``sum_i M_ii N_ii``.
In particular ``tr(P o P) = sum_i p_ii**2``. ``tr(P o P)^k`` means the trace of
the k-th *matrix* power of the Hadamard square ``P o P``.

Matrix products use whatever BLAS numpy is linked against. Results are
deterministic for a fixed BLAS thread count; different thread counts can
change the last bits of the cubic functionals.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field, fields
from typing import Optional, Sequence

import numpy as np
from scipy import linalg as sla

from .errors import DimensionMismatch, InputError, NonPositiveSigma, RankDeficient

__all__ = [
    "RANK_RTOL",
    "MAX_N",
    "DesignMatrix",
    "ProjectionMatrix",
    "ProjectionSummary",
    "GeneralSummary",
    "design_matrix",
    "ols_fit",
    "projection_matrix",
    "hadamard_power",
    "projection_functionals",
    "general_functionals",
    "check_projection",
]

RANK_RTOL = 1e-10
MAX_N = 4096


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    """Full-column-rank ``n x p`` design with its thin QR factors.

    Build with :func:`design_matrix`; the constructor does not validate.
    """

    entries: np.ndarray
    q: np.ndarray = field(repr=False)
    r: np.ndarray = field(repr=False)
    names: Optional[tuple] = None

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def p(self) -> int:
        return self.entries.shape[1]


def _dependent_columns(r, rank):
    """Columns carrying weight in the numerical null space of ``r``."""
    _, s, vt = np.linalg.svd(r)
    null = vt[rank:]
    weight = np.abs(null).max(axis=0)
    cols = np.flatnonzero(weight > 1e-8 * weight.max())
    return tuple(int(c) for c in cols)


def design_matrix(X, names: Optional[Sequence] = None) -> DesignMatrix:
    """Validate ``X`` and factorise it.

    Parameters
    ----------
    X : array_like, shape (n, p)
        Covariates. A 1-d array is treated as a single column.
    names : sequence of str, optional
        Column labels, only used in error messages.

    Raises
    ------
    DimensionMismatch
        If ``n <= p`` or ``p < 1``.
    RankDeficient
        If the smallest singular value is below ``RANK_RTOL`` times the
        largest one.
    """
    if isinstance(X, DesignMatrix):
        return X
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise DimensionMismatch(f"design must be 2-d, got shape {X.shape}")
    n, p = X.shape
    if p < 1 or n <= p:
        raise DimensionMismatch(f"need n > p >= 1, got n={n}, p={p}")
    if not np.all(np.isfinite(X)):
        raise InputError("design contains non-finite entries")
    # geqrf/orgqr: Householder reflections
    q, r = np.linalg.qr(X, mode="reduced")
    s = sla.svdvals(r)
    rank = int(np.sum(s > RANK_RTOL * s[0])) if s[0] > 0 else 0
    if rank < p:
        raise RankDeficient(_dependent_columns(r, rank), rank, p, names)
    return DesignMatrix(X, q, r, tuple(names) if names is not None else None)


def ols_fit(X, y):
    """Least-squares fit of ``y`` on the columns of ``X``.

    Returns
    -------
    beta : ndarray, shape (p,)
    residuals : ndarray, shape (n,)
        ``y - X @ beta``.
    """
    dm = design_matrix(X)
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (dm.n,):
        raise DimensionMismatch(f"y has shape {y.shape}, expected ({dm.n},)")
    beta = sla.solve_triangular(dm.r, dm.q.T @ y)
    residuals = y - dm.entries @ beta
    return beta, residuals


@dataclass(frozen=True, eq=False)
class ProjectionMatrix:
    """Residual-maker ``P`` of an ``n x p`` design.

    ``q`` is the orthonormal column basis with ``P = I - q q'``, when known.
    """

    P: np.ndarray
    n: int
    p: int
    q: Optional[np.ndarray] = field(default=None, repr=False)


def projection_matrix(X) -> ProjectionMatrix:
    """``P = I - Q Q'`` with ``Q`` an orthonormal basis of the columns of X."""
    dm = design_matrix(X)
    q = dm.q
    P = -(q @ q.T)
    P[np.diag_indices_from(P)] += 1.0
    P = 0.5 * (P + P.T)
    return ProjectionMatrix(P, dm.n, dm.p, q)


def check_projection(pm: ProjectionMatrix) -> None:
    """Assert the projection invariants; costs one ``n x n`` product."""
    P = pm.P
    if np.abs(P - P.T).max() > 1e-10:
        raise AssertionError("P is not symmetric")
    if np.abs(P @ P - P).max() > 1e-8:
        raise AssertionError("P is not idempotent")
    if abs(np.trace(P) - (pm.n - pm.p)) > 1e-8:
        raise AssertionError("tr P != n - p")
    d = np.diag(P)
    if d.min() < -1e-12 or d.max() > 1 + 1e-12:
        raise AssertionError("diagonal of P outside [0, 1]")


def hadamard_power(M, k: int) -> np.ndarray:
    """Entrywise ``k``-th power of ``M``."""
    k = int(k)
    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")
    M = np.asarray(M, dtype=np.float64)
    return M.copy() if k == 1 else M**k


def _as_P(P):
    if isinstance(P, ProjectionMatrix):
        return P.P
    P = np.asarray(P, dtype=np.float64)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got {P.shape}")
    return P


_SCRATCH = threading.local()
_SCRATCH_MAX_N = 1024


def _scratch(n, k):
    """``k`` per-thread ``n x n`` work arrays, kept between calls for small ``n``.

    Reusing them avoids page-faulting fresh multi-megabyte temporaries on
    every replication of a simulation.
    """
    if n > _SCRATCH_MAX_N:
        return [np.empty((n, n)) for _ in range(k)]
    bufs = getattr(_SCRATCH, "bufs", None)
    if bufs is None or bufs[0].shape[0] != n or len(bufs) < k:
        bufs = [np.empty((n, n)) for _ in range(k)]
        _SCRATCH.bufs = bufs
    return bufs[:k]


# fields that need O(n^3) work; only used with a non-Gaussian error profile
CUBIC_FIELDS = ("q3", "q4", "d2sq", "m1", "m2", "m3", "m4", "c2")


@dataclass(frozen=True)
class ProjectionSummary:
    """Trace functionals of a projection ``P`` (``D_P = diag(p_11, ..., p_nn)``).

    ============  =====================================
    ``trP``       ``tr P``
    ``t1``        ``tr(P o P) = sum_i p_ii^2``
    ``q2``        ``tr((P o P)^2) = sum_ij p_ij^4``
    ``q3``        ``tr((P o P)^3)``
    ``q4``        ``tr((P o P)^4)``
    ``d2``        ``Diag(P)' (P o P) Diag(P)``
    ``d2sq``      ``Diag(P)' (P o P)^2 Diag(P)``
    ``m1``        ``tr(P D_P P P^o3)``
    ``m2``        ``tr((P D_P P) o (P^o2 P^o2))``
    ``m3``        ``tr(P P^o3 P^o3)``
    ``m4``        ``tr((P^o3 P)^2)``
    ``m5``        ``1' P^o4 P^o4 1``
    ``c1``        ``tr(P P^o3)``
    ``c2``        ``tr((P D_P P) o P)``
    ``c3``        ``Diag(P)' P^o4 1``
    ============  =====================================

    The fields listed in ``CUBIC_FIELDS`` are ``None`` when the summary was
    built with ``cumulant_terms=False``.
    """

    n: int
    p: int
    trP: float
    t1: float
    q2: float
    d2: float
    m5: float
    c1: float
    c3: float
    q3: Optional[float] = None
    q4: Optional[float] = None
    d2sq: Optional[float] = None
    m1: Optional[float] = None
    m2: Optional[float] = None
    m3: Optional[float] = None
    m4: Optional[float] = None
    c2: Optional[float] = None

    @property
    def complete(self) -> bool:
        return all(getattr(self, f) is not None for f in CUBIC_FIELDS)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def projection_functionals(P, p: Optional[int] = None, cumulant_terms: bool = True) -> ProjectionSummary:
    """Evaluate every trace functional of ``P``.

    Parameters
    ----------
    P : ProjectionMatrix or ndarray
    p : int, optional
        Column count of the design; required when ``P`` is a bare array.
    cumulant_terms : bool
        When False only the O(n^2) functionals are evaluated. That is all a
        Gaussian error profile needs.
    """
    q = None
    if isinstance(P, ProjectionMatrix):
        n, p, q = P.n, P.p, P.q
    P = _as_P(P)
    n = P.shape[0]
    if p is None:
        p = int(round(np.trace(P)))
        p = n - p
    dP = np.diag(P).copy()
    S, P4, P3, S2, K31 = _scratch(n, 5)
    np.multiply(P, P, out=S)
    np.multiply(S, S, out=P4)
    np.multiply(S, P, out=P3)
    rowsum4 = P4.sum(axis=1)
    out = dict(
        n=n,
        p=int(p),
        trP=float(dP.sum()),
        t1=float(dP @ dP),
        q2=float(P4.sum()),
        d2=float(dP @ S @ dP),
        m5=float(rowsum4 @ rowsum4),
        c1=float(np.vdot(P, P3)),
        c3=float(dP @ rowsum4),
    )
    if cumulant_terms:
        np.matmul(S, S, out=S2)
        q2_mat = float(np.trace(S2))
        if abs(q2_mat - out["q2"]) > 1e-8 * max(abs(out["q2"]), 1e-300):
            raise AssertionError(f"tr((PoP)^2)={q2_mat} disagrees with 1'P^o4 1={out['q2']}")
        if q is not None and 2 * q.shape[1] < n:
            # P^o3 (I - q q') costs O(n^2 p) instead of O(n^3)
            np.matmul(P3 @ q, q.T, out=K31)
            np.subtract(P3, K31, out=K31)
        else:
            np.matmul(P3, P, out=K31)
        # diag(P D_P P) = (P o P) Diag(P)
        dPDP = S @ dP
        # tr(P D_P P P^o3) = sum_k p_kk (P P^o3 P)_kk, and P P^o3 P = P K31
        diag_PK31 = np.einsum("ki,ik->k", P, K31)
        # P, S, P3 are symmetric, so tr(M N) reduces to a flat dot product
        out.update(
            q3=float(np.vdot(S2, S)),
            q4=float(np.vdot(S2, S2)),
            d2sq=float(dP @ S2 @ dP),
            m1=float(dP @ diag_PK31),
            m2=float(dPDP @ np.diag(S2)),
            m3=float(np.vdot(K31, P3)),
            c2=float(dPDP @ dP),
        )
        # K31 is not symmetric; reuse P4 for its transpose
        P4[...] = K31.T
        out["m4"] = float(np.vdot(K31, P4))
    vals = [v for v in out.values() if v is not None]
    if not np.all(np.isfinite(vals)):
        raise AssertionError("non-finite projection functional")
    return ProjectionSummary(**out)


@dataclass(frozen=True)
class GeneralSummary:
    """Functionals of ``A = P diag(sigma)`` and ``B = A A'``.

    ``K_kl`` below denotes ``A^ok (A^ol)'`` and ``C = A'A``.

    ==========  =======================================================
    ``trB``     ``tr B``
    ``trB2``    ``tr B^2``
    ``tBB``     ``tr(B o B) = sum_i b_ii^2``
    ``tCC``     ``tr(C o C) = sum_j (sum_i a_ij^2)^2``
    ``sA4``     ``sum_ij a_ij^4``
    ``gd2``     ``Diag(B)' (B o B) Diag(B)``
    ``gq2``     ``tr((B o B)^2)``
    ``gm1``     ``tr(B D_B A (A^o3)')``
    ``gd2sq``   ``Diag(B)' K_22 Diag(B)``
    ``gq3``     ``tr((B o B) K_22)``
    ``gm4``     ``tr(K_31^2)``
    ``gq4``     ``tr(K_22^2)``
    ``gm3``     ``tr(B A^o3 (A^o3)')``
    ``gm2``     ``tr((A' D_B A) o ((A^o2)' A^o2))``
    ``gm5``     ``1' A^o4 (A^o4)' 1``
    ``gc0``     ``tr(B^2 o B)``
    ``gc1``     ``tr(B A (A^o3)')``
    ``gc2``     ``tr((A' D_B A) o C)``
    ``gc3``     ``Diag(C)' (A^o4)' 1``
    ==========  =======================================================

    ``gm4`` is the trace of the squared matrix; the Frobenius norm
    ``||K_31||_F^2`` only agrees with it when ``K_31`` is symmetric (sigma
    constant). Likewise the fourth-cumulant term of ``E T2`` uses ``tCC``,
    which equals ``tBB`` only for constant sigma.
    """

    n: int
    p: int
    trB: float
    trB2: float
    tBB: float
    tCC: float
    sA4: float
    gd2: float
    gq2: float
    gm1: float
    gd2sq: float
    gq3: float
    gm4: float
    gq4: float
    gm3: float
    gm2: float
    gm5: float
    gc0: float
    gc1: float
    gc2: float
    gc3: float

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


# GeneralSummary field -> ProjectionSummary field it reduces to when sigma == 1
NULL_COUNTERPART = {
    "trB": "trP",
    "trB2": "trP",
    "tBB": "t1",
    "tCC": "t1",
    "sA4": "q2",
    "gd2": "d2",
    "gq2": "q2",
    "gm1": "m1",
    "gd2sq": "d2sq",
    "gq3": "q3",
    "gm4": "m4",
    "gq4": "q4",
    "gm3": "m3",
    "gm2": "m2",
    "gm5": "m5",
    "gc0": "t1",
    "gc1": "c1",
    "gc2": "c2",
    "gc3": "c3",
}


def general_functionals(P, sigma, p: Optional[int] = None) -> GeneralSummary:
    """Functionals of ``A = P diag(sigma)`` for heteroscedastic errors.

    ``sigma`` holds the error standard deviations, so ``a_ij = p_ij sigma_j``.
    """
    if isinstance(P, ProjectionMatrix):
        p = P.p
    P = _as_P(P)
    n = P.shape[0]
    if p is None:
        p = n - int(round(np.trace(P)))
    sigma = np.asarray(sigma, dtype=np.float64)
    if sigma.shape != (n,):
        raise DimensionMismatch(f"sigma has shape {sigma.shape}, expected ({n},)")
    if not np.all(sigma > 0) or not np.all(np.isfinite(sigma)):
        raise NonPositiveSigma("all sigma_i must be positive and finite")

    A = P * sigma
    A2 = A * A
    A3 = A2 * A
    A4 = A2 * A2
    B = A @ A.T
    BB = B * B
    dB = A2.sum(axis=1)
    dC = A2.sum(axis=0)
    col4 = A4.sum(axis=0)
    K22 = A2 @ A2.T
    K31 = A3 @ A.T
    K33 = A3 @ A3.T
    dB_A2 = dB @ A2  # diag(A' D_B A)

    out = dict(
        n=n,
        p=int(p),
        trB=float(A2.sum()),
        trB2=float(BB.sum()),
        tBB=float(dB @ dB),
        tCC=float(dC @ dC),
        sA4=float(A4.sum()),
        gd2=float(dB @ BB @ dB),
        gq2=float(np.sum(BB * BB)),
        gm1=float(np.sum((dB[:, None] * B) * K31.T)),
        gd2sq=float(dB @ K22 @ dB),
        gq3=float(np.sum(BB * K22)),
        gm4=float(np.sum(K31 * K31.T)),
        gq4=float(np.sum(K22 * K22)),
        gm3=float(np.sum(B * K33)),
        gm2=float(dB_A2 @ col4),
        gm5=float(col4 @ col4),
        gc0=float(BB.sum(axis=1) @ dB),
        gc1=float(np.sum(B * K31)),
        gc2=float(dB_A2 @ dC),
        gc3=float(dC @ col4),
    )
    vals = [v for k, v in out.items() if k not in ("n", "p")]
    if not np.all(np.isfinite(vals)):
        raise AssertionError("non-finite general functional")
    return GeneralSummary(**out)
