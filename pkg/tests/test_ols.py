import numpy as np
import pytest

from engine.ols import back_substitute, build_lag_design, fit_ols, fit_pair, householder_qr
from models.errors import InsufficientData, InvalidLag, LengthMismatch, RankDeficient


def normal_equations_rss(predictors, response):
    """Extended-precision Cholesky solve of X'X b = X'y; returns the RSS."""
    x = np.asarray(predictors, dtype=np.longdouble)
    y = np.asarray(response, dtype=np.longdouble)
    gram = x.T @ x
    rhs = x.T @ y
    m = gram.shape[0]
    lower = np.zeros((m, m), dtype=np.longdouble)
    for i in range(m):
        for j in range(i + 1):
            total = gram[i, j] - np.sum(lower[i, :j] * lower[j, :j])
            lower[i, j] = np.sqrt(total) if i == j else total / lower[j, j]
    z = np.zeros(m, dtype=np.longdouble)
    for i in range(m):
        z[i] = (rhs[i] - np.sum(lower[i, :i] * z[:i])) / lower[i, i]
    beta = np.zeros(m, dtype=np.longdouble)
    for i in range(m - 1, -1, -1):
        beta[i] = (z[i] - np.sum(lower[i + 1:, i] * beta[i + 1:])) / lower[i, i]
    residuals = y - x @ beta
    return float(residuals @ residuals)


class TestBuildLagDesign:

    def test_layout(self):
        y = np.arange(10.0)
        x = np.arange(10.0) ** 2
        design = build_lag_design(y, x, lag=2)
        assert design.predictors.shape == (8, 5)
        assert design.n_eff == 8
        assert design.n_params == 5
        np.testing.assert_array_equal(design.response, y[2:])
        np.testing.assert_array_equal(design.predictors[:, 0], np.ones(8))
        np.testing.assert_array_equal(design.predictors[:, 1], y[1:9])
        np.testing.assert_array_equal(design.predictors[:, 2], y[0:8])
        np.testing.assert_array_equal(design.predictors[:, 3], x[1:9])
        np.testing.assert_array_equal(design.predictors[:, 4], x[0:8])

    def test_restricted_layout(self):
        design = build_lag_design(np.arange(10.0), None, lag=3)
        assert design.predictors.shape == (7, 4)

    def test_design_is_read_only(self):
        design = build_lag_design(np.arange(10.0), np.arange(10.0) ** 2, lag=1)
        with pytest.raises(ValueError):
            design.predictors[0, 0] = 2.0

    def test_insufficient_rows(self):
        with pytest.raises(InsufficientData) as info:
            build_lag_design(np.arange(6.0), np.arange(6.0), lag=2)
        assert info.value.lag == 2
        assert info.value.n_params == 5

    @pytest.mark.parametrize("lag", [0, -1, 1.5, True])
    def test_invalid_lag(self, lag):
        with pytest.raises(InvalidLag):
            build_lag_design(np.arange(20.0), None, lag=lag)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            build_lag_design(np.arange(20.0), np.arange(19.0), lag=1)


class TestHouseholder:

    def test_matches_lstsq(self, rng):
        a = rng.standard_normal((40, 6))
        b = rng.standard_normal(40)
        r, qtb = householder_qr(a, b)
        assert np.allclose(np.tril(r, -1), 0.0)
        solution = back_substitute(r, qtb[:6])
        expected, *_ = np.linalg.lstsq(a, b, rcond=None)
        np.testing.assert_allclose(solution, expected, rtol=1e-10, atol=1e-12)

    def test_r_reproduces_gram_matrix(self, rng):
        a = rng.standard_normal((25, 4))
        r, _ = householder_qr(a, np.zeros(25))
        np.testing.assert_allclose(r.T @ r, a.T @ a, rtol=1e-10, atol=1e-10)


class TestFitOls:

    def test_exact_recovery(self, rng):
        n = 60
        x = rng.standard_normal(n)
        y = np.zeros(n)
        for t in range(1, n):
            y[t] = 1.0 + 0.5 * y[t - 1] + 0.3 * x[t - 1]
        fit = fit_pair(y, x, lag=1)
        np.testing.assert_allclose(fit.coefficients, [1.0, 0.5, 0.3], atol=1e-10)
        assert fit.rss < 1e-20

    def test_residuals_are_recomputed(self, rng):
        y, x = rng.standard_normal(50), rng.standard_normal(50)
        design = build_lag_design(y, x, lag=2)
        fit = fit_ols(design)
        np.testing.assert_allclose(fit.residuals, design.response - design.predictors @ fit.coefficients)
        assert fit.rss == pytest.approx(float(fit.residuals @ fit.residuals))
        assert fit.sigma2 == pytest.approx(fit.rss / fit.n_eff)

    def test_matches_extended_precision_oracle(self, rng):
        for _ in range(50):
            n = int(rng.integers(20, 61))
            lag = int(rng.integers(1, 4))
            y = np.cumsum(rng.standard_normal(n)) * 0.3 + rng.standard_normal(n)
            x = rng.standard_normal(n) * rng.uniform(0.1, 100.0)
            design = build_lag_design(y, x, lag)
            fit = fit_ols(design)
            oracle = normal_equations_rss(design.predictors, design.response)
            assert fit.rss == pytest.approx(oracle, rel=1e-8)

    def test_residuals_orthogonal_to_predictors(self, rng):
        for _ in range(50):
            n = int(rng.integers(20, 80))
            lag = int(rng.integers(1, 4))
            design = build_lag_design(rng.standard_normal(n), rng.standard_normal(n) * 50.0, lag)
            fit = fit_ols(design)
            bound = 1e-8 * np.linalg.norm(design.predictors, axis=0) * np.linalg.norm(fit.residuals)
            assert np.all(np.abs(design.predictors.T @ fit.residuals) <= bound)

    def test_rss_affine_invariance(self, rng):
        y, x = rng.standard_normal(80), rng.standard_normal(80)
        base = fit_pair(y, x, lag=2).rss
        moved = fit_pair(3.5 * y - 20.0, 0.01 * x + 7.0, lag=2).rss
        assert moved == pytest.approx(3.5 ** 2 * base, rel=1e-8)

    def test_nested_models(self, rng):
        for _ in range(200):
            n = int(rng.integers(15, 80))
            lag = int(rng.integers(1, 4))
            y, x = rng.standard_normal(n), rng.standard_normal(n)
            restricted = fit_pair(y, None, lag)
            unrestricted = fit_pair(y, x, lag)
            assert unrestricted.rss <= restricted.rss * (1.0 + 1e-12)

    def test_collinear_cause(self, rng):
        y = rng.standard_normal(40)
        with pytest.raises(RankDeficient):
            fit_pair(y, y.copy(), lag=1)

    def test_constant_series(self):
        with pytest.raises(RankDeficient):
            fit_pair(np.full(30, 2.0), None, lag=1)

    def test_zero_column(self, rng):
        with pytest.raises(RankDeficient) as info:
            fit_pair(rng.standard_normal(30), np.zeros(30), lag=1)
        assert info.value.column == 2
