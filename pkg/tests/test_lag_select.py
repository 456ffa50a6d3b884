import math

import numpy as np
import pytest

from engine.simulation import simulate
from models.errors import InsufficientData, InvalidLag, InvalidParameter
from models.models import DfConvention, VarSpec
from workflows.granger import granger_causality_test
from workflows.lag_select import granger_lag_select, granger_lag_select_columns, information_criteria


class TestGrangerLagSelect:

    def test_rows_match_single_tests(self, causal_pair):
        x, y = causal_pair
        scan = granger_lag_select(x, y, lags=range(1, 5), x_name="x", y_name="y")
        assert scan.lags == (1, 2, 3, 4)
        for lag in scan.lags:
            single = granger_causality_test(x, y, lag=lag)
            row = scan.row(lag)
            assert row.p_value_xy == single.p_value_xy
            assert row.p_value_yx == single.p_value_yx
            assert row.statistic_xy == single.test_statistic_xy
            assert row.significant_xy == single.x_causes_y

    def test_summary_fields(self, causal_pair):
        scan = granger_lag_select(*causal_pair, lags=[1, 2, 3])
        assert scan.n_significant_xy == 3
        assert scan.n_significant_xy == sum(row.significant_xy for row in scan.per_lag)
        assert scan.n_significant_yx == sum(row.significant_yx for row in scan.per_lag)
        best = min(scan.per_lag, key=lambda r: (r.p_value_xy, r.lag))
        assert scan.best_lag_xy == best.lag
        assert scan.best_p_xy == best.p_value_xy
        assert scan.n == 300

    def test_true_lag_preferred_by_bic(self, causal_pair):
        scan = granger_lag_select(*causal_pair, lags=range(1, 7))
        assert scan.bic_lag == 1
        assert all(math.isfinite(row.aic) and math.isfinite(row.bic) for row in scan.per_lag)
        assert all(row.bic >= row.aic for row in scan.per_lag)

    def test_lags_are_sorted(self, causal_pair):
        scan = granger_lag_select(*causal_pair, lags=[4, 2, 3])
        assert scan.lags == (2, 3, 4)

    def test_threads_do_not_change_output(self, causal_pair):
        serial = granger_lag_select(*causal_pair, lags=range(1, 6), threads=1)
        pooled = granger_lag_select(*causal_pair, lags=range(1, 6), threads=3)
        assert serial == pooled

    def test_p_value_curve(self, causal_pair):
        scan = granger_lag_select(*causal_pair, lags=[1, 2])
        curve = scan.p_value_curve()
        assert [point[0] for point in curve] == [1, 2]
        assert curve[1][1] == scan.row(2).p_value_xy

    def test_infeasible_lag_named(self, rng):
        x, y = rng.standard_normal(20), rng.standard_normal(20)
        with pytest.raises(InsufficientData) as info:
            granger_lag_select(x, y, lags=range(1, 9))
        assert info.value.lag == 8

    def test_covariance_boundary(self, rng):
        x, y = rng.standard_normal(8), rng.standard_normal(8)
        assert granger_causality_test(x, y, lag=2).n == 8
        with pytest.raises(InsufficientData) as info:
            granger_lag_select(x, y, lags=[1, 2])
        assert info.value.lag == 2
        assert info.value.n_params == 6

    def test_smallest_feasible_sample(self, rng):
        x, y = rng.standard_normal(9), rng.standard_normal(9)
        scan = granger_lag_select(x, y, lags=[1, 2])
        assert all(math.isfinite(row.aic) for row in scan.per_lag)

    def test_threads_from_environment(self, causal_pair, monkeypatch):
        monkeypatch.setenv("GRANGER_THREADS", "2")
        pooled = granger_lag_select(*causal_pair, lags=[1, 2, 3])
        assert pooled == granger_lag_select(*causal_pair, lags=[1, 2, 3], threads=1)

    def test_zero_threads_rejected(self, causal_pair):
        with pytest.raises(InvalidParameter):
            granger_lag_select(*causal_pair, lags=[1], threads=0)

    def test_invalid_lag(self, causal_pair):
        with pytest.raises(InvalidLag):
            granger_lag_select(*causal_pair, lags=[0, 1])

    def test_df_convention_passed_through(self, causal_pair):
        scan = granger_lag_select(*causal_pair, lags=[2], df_convention=DfConvention.RAW)
        single = granger_causality_test(*causal_pair, lag=2, df_convention=DfConvention.RAW)
        assert scan.row(2).p_value_yx == single.p_value_yx

    def test_columns_form(self, chain_table):
        scan = granger_lag_select_columns(chain_table, "a", "b", lags=[1, 2])
        assert (scan.x_name, scan.y_name) == ("a", "b")
        assert scan.row(1).significant_xy


class TestInformationCriteria:

    def test_formula(self, causal_pair):
        x, y = causal_pair
        lag = 2
        n_eff = len(x) - lag
        residuals = []
        for effect, cause in ((y, x), (x, y)):
            predictors = np.column_stack(
                [np.ones(n_eff)]
                + [effect[lag - i:len(x) - i] for i in range(1, lag + 1)]
                + [cause[lag - i:len(x) - i] for i in range(1, lag + 1)]
            )
            coefficients, *_ = np.linalg.lstsq(predictors, effect[lag:], rcond=None)
            residuals.append(effect[lag:] - predictors @ coefficients)
        covariance = np.cov(np.vstack(residuals), bias=True)
        log_det = math.log(np.linalg.det(covariance))
        aic, bic = information_criteria(x, y, lag)
        assert aic == pytest.approx(log_det + 2.0 * lag * 4 / n_eff, rel=1e-9, abs=1e-10)
        assert bic == pytest.approx(log_det + lag * 4 * math.log(n_eff) / n_eff, rel=1e-9, abs=1e-10)



@pytest.mark.slow
def test_aic_prefers_lag_one_on_white_noise():
    hits = 0
    for seed in range(200):
        spec = VarSpec(lag=1, own_coeffs=((0.0,), (0.0,)), cross_coeffs=((0.0,), (0.0,)), n_obs=500, seed=seed)
        table = simulate(spec)
        scan = granger_lag_select(table.column("x"), table.column("y"), lags=range(1, 5), threads=1)
        hits += scan.aic_lag == 1
    assert hits >= 120
