import numpy as np
import pytest

from models.errors import (
    ConstantSeries,
    InsufficientData,
    InvalidLag,
    InvalidParameter,
    LengthMismatch,
    NonFiniteValue,
    UnknownColumn,
    UnsupportedTest,
)
from models.models import DfConvention, GrangerResult
from workflows.granger import (
    denominator_df,
    directional_test,
    glance,
    granger_causality_test,
    granger_test_columns,
    tidy,
)


def lstsq_rss(response, predictors):
    coefficients, *_ = np.linalg.lstsq(predictors, response, rcond=None)
    residuals = response - predictors @ coefficients
    return float(residuals @ residuals)


def reference_statistic(cause, effect, lag):
    n = len(effect)
    response = effect[lag:]
    own = [effect[lag - i:n - i] for i in range(1, lag + 1)]
    cross = [cause[lag - i:n - i] for i in range(1, lag + 1)]
    ones = np.ones(n - lag)
    rss_r = lstsq_rss(response, np.column_stack([ones, *own]))
    rss_u = lstsq_rss(response, np.column_stack([ones, *own, *cross]))
    return ((rss_r - rss_u) / lag) / (rss_u / (n - lag - 2 * lag - 1))


class TestGrangerAnalytical:
    """Known causal structure."""

    def test_causal_direction_detected(self, causal_pair):
        x, y = causal_pair
        result = granger_causality_test(x, y, lag=1)
        assert result.x_causes_y
        assert result.p_value_xy < 1e-10
        assert result.p_value_yx > 1e-3

    def test_independent_not_detected(self, independent_pair):
        x, y = independent_pair
        result = granger_causality_test(x, y, lag=2)
        assert result.p_value_xy > 1e-3
        assert result.p_value_yx > 1e-3

    def test_statistic_matches_direct_regression(self, causal_pair):
        x, y = causal_pair
        result = granger_causality_test(x, y, lag=3)
        assert result.test_statistic_xy == pytest.approx(reference_statistic(x, y, 3), rel=1e-8)
        assert result.test_statistic_yx == pytest.approx(reference_statistic(y, x, 3), rel=1e-8)

    def test_p_value_matches_reference_distribution(self, causal_pair):
        stats = pytest.importorskip("scipy.stats")
        x, y = causal_pair
        result = granger_causality_test(x, y, lag=2)
        assert result.df_num == 2
        assert result.df_den == 2 * (300 - 2 - 5)
        expected = stats.f.sf(result.test_statistic_yx, result.df_num, result.df_den)
        assert result.p_value_yx == pytest.approx(expected, rel=1e-8)


class TestGrangerProperties:

    def test_swap_symmetry(self, causal_pair):
        x, y = causal_pair
        forward = granger_causality_test(x, y, lag=2, x_name="x", y_name="y")
        swapped = granger_causality_test(y, x, lag=2, x_name="y", y_name="x")
        assert forward.p_value_xy == swapped.p_value_yx
        assert forward.p_value_yx == swapped.p_value_xy
        assert forward.test_statistic_xy == swapped.test_statistic_yx

    def test_affine_invariance(self, causal_pair):
        x, y = causal_pair
        base = granger_causality_test(x, y, lag=2)
        moved = granger_causality_test(5.0 + 3.0 * x, -2.0 - 0.5 * y, lag=2)
        assert moved.test_statistic_xy == pytest.approx(base.test_statistic_xy, rel=1e-8)
        assert moved.test_statistic_yx == pytest.approx(base.test_statistic_yx, rel=1e-8)

    def test_verdicts_follow_alpha(self, causal_pair):
        x, y = causal_pair
        result = granger_causality_test(x, y, lag=1, alpha=0.2)
        assert result.x_causes_y == (result.p_value_xy < 0.2)
        assert result.y_causes_x == (result.p_value_yx < 0.2)
        assert result.n == 300
        assert result.lag == 1

    def test_inconsistent_verdict_rejected(self):
        with pytest.raises(InvalidParameter):
            GrangerResult(
                x_name="x", y_name="y", lag=1, alpha=0.05, n=50, x_causes_y=True, y_causes_x=False,
                p_value_xy=0.5, p_value_yx=0.5, test_statistic_xy=0.1, test_statistic_yx=0.1, df_num=1, df_den=94,
            )

    def test_exact_fit_gives_zero_p_value(self, rng):
        n = 40
        x = rng.standard_normal(n)
        y = np.zeros(n)
        y[1:] = 2.0 * x[:-1]
        test = directional_test(x, y, 1, "x", "y")
        assert test.p_value == 0.0
        assert test.statistic > 1e10


class TestDegreesOfFreedom:

    @pytest.mark.parametrize("convention,expected", [
        (DfConvention.SYSTEM, 154),
        (DfConvention.EFFECTIVE, 77),
        (DfConvention.RAW, 79),
    ])
    def test_denominator(self, convention, expected):
        assert denominator_df(84, 2, convention) == expected

    def test_convention_changes_only_p(self, causal_pair):
        x, y = causal_pair
        system = granger_causality_test(x, y, lag=2, df_convention="system")
        effective = granger_causality_test(x, y, lag=2, df_convention=DfConvention.EFFECTIVE)
        assert system.test_statistic_yx == effective.test_statistic_yx
        assert effective.df_den == 293
        assert effective.df_convention == DfConvention.EFFECTIVE
        assert effective.p_value_xy >= system.p_value_xy


class TestGrangerValidation:

    def test_too_few_observations(self, rng):
        with pytest.raises(InsufficientData):
            granger_causality_test(rng.standard_normal(10), rng.standard_normal(10), lag=3)

    @pytest.mark.parametrize("lag", [0, -2, 2.0])
    def test_invalid_lag(self, causal_pair, lag):
        with pytest.raises(InvalidLag):
            granger_causality_test(*causal_pair, lag=lag)

    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.1, 1.5])
    def test_invalid_alpha(self, causal_pair, alpha):
        with pytest.raises(InvalidParameter):
            granger_causality_test(*causal_pair, alpha=alpha)

    def test_unsupported_test(self, causal_pair):
        with pytest.raises(UnsupportedTest):
            granger_causality_test(*causal_pair, test="chisq")

    def test_non_finite(self, causal_pair):
        x, y = causal_pair
        x = x.copy()
        x[10] = np.nan
        with pytest.raises(NonFiniteValue) as info:
            granger_causality_test(x, y, x_name="e")
        assert info.value.name == "e"

    def test_constant_series(self, causal_pair):
        x, _ = causal_pair
        with pytest.raises(ConstantSeries) as info:
            granger_causality_test(x, np.ones_like(x), y_name="U")
        assert info.value.name == "U"

    def test_length_mismatch(self, causal_pair):
        x, y = causal_pair
        with pytest.raises(LengthMismatch):
            granger_causality_test(x, y[:-1])


class TestTidyGlance:

    def test_tidy_rows(self, causal_pair):
        result = granger_causality_test(*causal_pair, lag=1, x_name="e", y_name="U")
        frame = tidy(result)
        assert list(frame.columns) == ["direction", "cause", "effect", "statistic", "p.value", "significant"]
        assert frame["direction"].tolist() == ["e -> U", "U -> e"]
        assert frame.loc[0, "p.value"] == result.p_value_xy
        assert bool(frame.loc[0, "significant"]) == result.x_causes_y

    def test_glance_row(self, causal_pair):
        result = granger_causality_test(*causal_pair, lag=2, x_name="e", y_name="U")
        row = glance(result).iloc[0].to_dict()
        assert row == {"lag": 2, "alpha": 0.05, "n": 300, "x_name": "e", "y_name": "U"}

    def test_columns_form(self, chain_table):
        result = granger_test_columns(chain_table, "a", "b", lag=1)
        direct = granger_causality_test(chain_table.column("a"), chain_table.column("b"), lag=1, x_name="a", y_name="b")
        assert result == direct
        with pytest.raises(UnknownColumn):
            granger_test_columns(chain_table, "a", "zz")
