import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fcvt import (
    design_matrix,
    general_functionals,
    hadamard_power,
    ols_fit,
    projection_functionals,
    projection_matrix,
)
from fcvt.design import NULL_COUNTERPART, check_projection
from fcvt.errors import DimensionMismatch, NonPositiveSigma, RankDeficient
from fcvt.oracle import VAR_T1_PATTERNS, naive_omega_sum

from conftest import half2, random_design, random_projection, rel_err


class TestOLS:
    def test_intercept_only_mean_fit(self):
        beta, resid = ols_fit(np.ones((2, 1)), [1.0, 3.0])
        np.testing.assert_allclose(beta, [2.0])
        np.testing.assert_allclose(resid, [-1.0, 1.0])

    def test_exact_fit_gives_zero_residuals(self, rng):
        X = rng.standard_normal((15, 3))
        _, resid = ols_fit(X, X @ np.array([1.0, -2.0, 0.5]))
        assert np.abs(resid).max() < 1e-12

    def test_residuals_equal_Py(self, rng):
        X = rng.standard_normal((20, 3))
        y = rng.standard_normal(20)
        # independent path through the normal equations
        P = np.eye(20) - X @ np.linalg.solve(X.T @ X, X.T)
        _, resid = ols_fit(X, y)
        np.testing.assert_allclose(resid, P @ y, atol=1e-10)

    def test_residuals_orthogonal_to_columns(self, rng):
        X = rng.standard_normal((50, 7))
        y = rng.standard_normal(50) * 100
        _, resid = ols_fit(X, y)
        assert np.abs(X.T @ resid).max() <= 1e-8 * np.linalg.norm(y)

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatch):
            ols_fit(np.ones((4, 1)), np.ones(3))


class TestDesignMatrix:
    @pytest.mark.parametrize("shape", [(3, 3), (2, 5), (5, 0)])
    def test_needs_n_greater_than_p(self, shape):
        with pytest.raises(DimensionMismatch):
            design_matrix(np.ones(shape))

    def test_duplicated_column_names_both(self, rng):
        X = rng.standard_normal((30, 3))
        X = np.column_stack([X, X[:, 1]])
        with pytest.raises(RankDeficient) as info:
            design_matrix(X, names=["a", "b", "c", "b_copy"])
        assert info.value.columns == (1, 3)
        assert "b, b_copy" in str(info.value)

    def test_constant_column_with_intercept(self, rng):
        X = np.column_stack([np.ones(10), rng.standard_normal(10), 3 * np.ones(10)])
        with pytest.raises(RankDeficient) as info:
            design_matrix(X)
        assert info.value.columns == (0, 2)

    def test_near_collinear_passes_cutoff(self, rng):
        X = rng.standard_normal((40, 2))
        X[:, 1] = X[:, 0] + 1e-6 * rng.standard_normal(40)
        assert design_matrix(X).p == 2


class TestProjection:
    def test_centering_matrix(self):
        pm = projection_matrix(np.ones((2, 1)))
        np.testing.assert_allclose(pm.P, [[0.5, -0.5], [-0.5, 0.5]], atol=1e-15)

    def test_trace_one_when_p_is_n_minus_one(self, rng):
        pm = projection_matrix(rng.standard_normal((9, 8)))
        assert abs(np.trace(pm.P) - 1.0) < 1e-10

    def test_idempotent_small(self):
        P = random_projection(4, 4, 2).P
        assert np.abs(P @ P - P).max() < 1e-10

    @pytest.mark.parametrize("n,p", [(5, 1), (40, 7), (200, 150)])
    def test_invariants(self, n, p):
        pm = random_projection(n + p, n, p)
        check_projection(pm)
        ev = np.linalg.eigvalsh(pm.P)
        assert np.all(np.minimum(np.abs(ev), np.abs(ev - 1)) < 1e-6)


class TestHadamard:
    def test_cube(self):
        np.testing.assert_array_equal(hadamard_power([[2.0]], 3), [[8.0]])

    def test_identity_case(self, rng):
        M = rng.standard_normal((3, 3))
        np.testing.assert_array_equal(hadamard_power(M, 1), M)

    def test_sign_elimination(self):
        np.testing.assert_array_equal(hadamard_power([[1, -1], [-1, 1]], 4), np.ones((2, 2)))

    def test_rejects_zero_power(self):
        with pytest.raises(ValueError):
            hadamard_power(np.eye(2), 0)


def naive_projection_fields(P):
    """Every ProjectionSummary field straight from its matrix expression."""
    n = P.shape[0]
    D = np.diag(np.diag(P))
    dP = np.diag(P)
    S = P * P
    P3, P4 = P**3, P**4
    PDP = P @ D @ P
    one = np.ones(n)
    mp = np.linalg.matrix_power
    return dict(
        trP=np.trace(P),
        t1=np.sum(dP**2),
        q2=np.trace(mp(S, 2)),
        q3=np.trace(mp(S, 3)),
        q4=np.trace(mp(S, 4)),
        d2=dP @ S @ dP,
        d2sq=dP @ mp(S, 2) @ dP,
        m1=np.trace(PDP @ P3),
        m2=np.trace(PDP * (S @ S)),
        m3=np.trace(P @ P3 @ P3),
        m4=np.trace(mp(P3 @ P, 2)),
        m5=one @ (P4 @ P4) @ one,
        c1=np.trace(P @ P3),
        c2=np.trace(PDP * P),
        c3=dP @ P4 @ one,
    )


class TestProjectionFunctionals:
    def test_centering_two_by_two(self):
        s = projection_functionals(projection_matrix(np.ones((2, 1))))
        assert s.t1 == pytest.approx(0.5, abs=1e-15)
        assert s.q2 == pytest.approx(0.25, abs=1e-15)

    @pytest.mark.parametrize("seed", range(3))
    def test_fields_match_matrix_expressions(self, seed):
        P = random_projection(seed, 8, 2).P
        s = projection_functionals(P).as_dict()
        for k, v in naive_projection_fields(P).items():
            assert rel_err(s[k], v) < 1e-10, k

    def test_fields_match_index_sums(self):
        P = random_projection(11, 8, 2).P
        s = projection_functionals(P)
        ones = np.ones(8)
        g = general_functionals(P, ones)
        for gf, pattern in VAR_T1_PATTERNS.items():
            naive = naive_omega_sum(P, pattern)
            assert rel_err(getattr(s, NULL_COUNTERPART[gf]), naive) < 1e-10, gf
            assert rel_err(getattr(g, gf), naive) < 1e-10, gf

    def test_light_mode_leaves_cubic_fields_empty(self):
        s = projection_functionals(random_projection(0, 30, 3), cumulant_terms=False)
        assert not s.complete and s.q3 is None and s.m4 is None
        full = projection_functionals(random_projection(0, 30, 3))
        assert full.complete and full.t1 == s.t1

    def test_gaussian_design_leverage_sum(self):
        pm = random_projection(1000, 1000, 200)
        t1 = projection_functionals(pm, cumulant_terms=False).t1
        assert 635 <= t1 <= 646

    def test_equal_leverage_bound_is_tight(self):
        n = 50
        s = projection_functionals(projection_matrix(np.ones((n, 1))))
        assert abs(s.t1 - (n - 1) ** 2 / n) < 1e-10


designs = st.tuples(
    st.integers(0, 2**32 - 1), st.integers(3, 40), st.integers(1, 10)
).filter(lambda t: t[2] < t[1])


@settings(max_examples=100, deadline=None)
@given(designs)
def test_algebraic_identities(d):
    seed, n, p = d
    pm = random_projection(seed, n, p)
    s = projection_functionals(pm)
    assert abs(s.trP - (n - p)) < 1e-8
    assert abs(s.c1 - s.q2) <= 1e-10 * max(1.0, s.q2)
    assert abs(s.c2 - s.d2) <= 1e-10 * max(1.0, s.d2)
    assert s.t1 >= (n - p) ** 2 / n - 1e-10
    for f in ("q2", "q3", "q4", "m3", "m4", "m5"):
        assert getattr(s, f) >= -1e-12
    assert all(np.isfinite(v) for v in s.as_dict().values())


@settings(max_examples=100, deadline=None)
@given(designs)
def test_column_space_invariance(d):
    seed, n, p = d
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    G = rng.standard_normal((p, p)) + 2 * np.eye(p)
    a = projection_functionals(projection_matrix(X)).as_dict()
    b = projection_functionals(projection_matrix(X @ G)).as_dict()
    for k in a:
        assert abs(a[k] - b[k]) <= 1e-8 * max(abs(a[k]), 1.0), k


class TestGeneralFunctionals:
    def test_unit_sigma_reduces_to_null(self):
        pm = random_projection(3, 12, 3)
        s = projection_functionals(pm).as_dict()
        g = general_functionals(pm, np.ones(12)).as_dict()
        for gf, pf in NULL_COUNTERPART.items():
            assert rel_err(g[gf], s[pf]) < 1e-10, gf

    def test_constant_sigma_scales_B(self):
        pm = random_projection(5, 12, 3)
        g = general_functionals(pm, np.full(12, 3.0))
        assert g.trB == pytest.approx(9.0 * 9, rel=1e-12)

    def test_trace_B(self):
        pm = random_projection(6, 12, 3)
        sig = np.linspace(0.5, 2.0, 12)
        g = general_functionals(pm, sig)
        assert abs(g.trB - np.diag(pm.P) @ sig**2) < 1e-8

    def test_half2_matches_index_sums(self):
        pm = random_projection(7, 8, 2)
        sig = half2(8)
        A = pm.P * sig
        g = general_functionals(pm, sig)
        for gf, pattern in VAR_T1_PATTERNS.items():
            assert rel_err(getattr(g, gf), naive_omega_sum(A, pattern)) < 1e-10, gf

    @pytest.mark.parametrize("bad", [0.0, -1.0, np.nan])
    def test_nonpositive_sigma(self, bad):
        sig = np.ones(6)
        sig[2] = bad
        with pytest.raises(NonPositiveSigma):
            general_functionals(random_projection(0, 6, 1), sig)
