"""
Bivariate Granger Causality
===========================
Purpose: Bidirectional F-test of whether lagged x improves prediction of y
and vice versa, packaged with broom-style tidy and glance tables.
"""

import logging

import numpy as np
import pandas as pd

from engine.distributions import f_sf
from engine.ols import build_lag_design, fit_ols
from models.errors import (
    ConstantSeries,
    InsufficientData,
    InvalidLag,
    InvalidParameter,
    LengthMismatch,
    NonFiniteValue,
    UnsupportedTest,
)
from models.models import DfConvention, DirectionalTest, FParams, GrangerResult, SeriesTable

logger = logging.getLogger(__name__)

SUPPORTED_TESTS = ("F",)
N_VARIABLES = 2


def check_test(test: str) -> None:
    if test not in SUPPORTED_TESTS:
        raise UnsupportedTest(test)


def check_alpha(alpha: float) -> float:
    if not 0.0 < alpha < 1.0:
        raise InvalidParameter("alpha", alpha, "significance level must lie in (0, 1)")
    return float(alpha)


def check_lag(lag: int, n_obs: int) -> int:
    if isinstance(lag, bool) or not isinstance(lag, (int, np.integer)) or lag < 1:
        raise InvalidLag(lag)
    if n_obs <= 3 * lag + 1:
        raise InsufficientData(n_obs, int(lag), 1 + 2 * int(lag))
    return int(lag)


def as_series(values, name: str) -> np.ndarray:
    array = np.asarray(values, dtype=np.float64)
    if array.ndim != 1:
        raise InvalidParameter(name, array.shape, "expected a one-dimensional series")
    if not np.all(np.isfinite(array)):
        raise NonFiniteValue(name)
    if array.size and np.all(array == array[0]):
        raise ConstantSeries(name)
    return array


def denominator_df(n_obs: int, lag: int, convention: DfConvention) -> int:
    """Denominator degrees of freedom of the reference F distribution."""
    n_eff = n_obs - lag
    residual_df = n_eff - N_VARIABLES * lag - 1
    if convention == DfConvention.SYSTEM:
        return N_VARIABLES * residual_df
    if convention == DfConvention.EFFECTIVE:
        return residual_df
    return n_obs - N_VARIABLES * lag - 1


def directional_test(
    cause: np.ndarray,
    effect: np.ndarray,
    lag: int,
    cause_name: str = "x",
    effect_name: str = "y",
    df_convention: DfConvention = DfConvention.SYSTEM,
) -> DirectionalTest:
    """F-test of H0: lags of `cause` add nothing to the `effect` equation.

    Inputs are assumed validated by the caller (equal length, finite,
    non-constant, enough observations for `lag`).
    """
    restricted = fit_ols(build_lag_design(effect, None, lag))
    unrestricted = fit_ols(build_lag_design(effect, cause, lag))

    df_den = denominator_df(len(effect), lag, df_convention)
    residual_df = unrestricted.n_eff - unrestricted.n_params
    gain = max(restricted.rss - unrestricted.rss, 0.0)
    if unrestricted.rss > 0.0:
        statistic = (gain / lag) / (unrestricted.rss / residual_df)
        p_value = f_sf(statistic, FParams(d1=lag, d2=df_den))
    else:
        # exact fit of the unrestricted equation
        statistic = float(np.finfo(np.float64).max) if gain > 0.0 else 0.0
        p_value = 0.0 if gain > 0.0 else 1.0

    return DirectionalTest(
        cause=cause_name,
        effect=effect_name,
        lag=lag,
        statistic=float(statistic),
        p_value=p_value,
        df_num=lag,
        df_den=df_den,
        rss_restricted=restricted.rss,
        rss_unrestricted=unrestricted.rss,
        n_eff=unrestricted.n_eff,
    )


def granger_causality_test(
    x,
    y,
    lag: int = 1,
    alpha: float = 0.05,
    test: str = "F",
    x_name: str = "x",
    y_name: str = "y",
    df_convention: DfConvention = DfConvention.SYSTEM,
) -> GrangerResult:
    """Test x -> y and y -> x at one lag order."""
    check_test(test)
    alpha = check_alpha(alpha)
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(x) != len(y):
        raise LengthMismatch(len(x), len(y))
    lag = check_lag(lag, len(x))
    x = as_series(x, x_name)
    y = as_series(y, y_name)
    df_convention = DfConvention(df_convention)

    xy = directional_test(x, y, lag, x_name, y_name, df_convention)
    yx = directional_test(y, x, lag, y_name, x_name, df_convention)
    logger.debug(
        "granger %s<->%s lag=%d F=(%.6g, %.6g) p=(%.3g, %.3g)",
        x_name, y_name, lag, xy.statistic, yx.statistic, xy.p_value, yx.p_value,
    )
    return GrangerResult(
        x_name=x_name,
        y_name=y_name,
        lag=lag,
        alpha=alpha,
        n=len(x),
        test=test,
        x_causes_y=xy.p_value < alpha,
        y_causes_x=yx.p_value < alpha,
        p_value_xy=xy.p_value,
        p_value_yx=yx.p_value,
        test_statistic_xy=xy.statistic,
        test_statistic_yx=yx.statistic,
        df_num=xy.df_num,
        df_den=xy.df_den,
        df_convention=df_convention,
    )


def granger_test_columns(table: SeriesTable, x: str, y: str, **kwargs) -> GrangerResult:
    """granger_causality_test on two named columns of a table."""
    return granger_causality_test(table.column(x), table.column(y), x_name=x, y_name=y, **kwargs)


def tidy(result: GrangerResult) -> pd.DataFrame:
    """One row per direction: x -> y first, then y -> x."""
    rows = [
        (result.x_name, result.y_name, result.test_statistic_xy, result.p_value_xy, result.x_causes_y),
        (result.y_name, result.x_name, result.test_statistic_yx, result.p_value_yx, result.y_causes_x),
    ]
    return pd.DataFrame(
        [
            {
                "direction": f"{cause} -> {effect}",
                "cause": cause,
                "effect": effect,
                "statistic": statistic,
                "p.value": p_value,
                "significant": significant,
            }
            for cause, effect, statistic, p_value, significant in rows
        ]
    )


def glance(result: GrangerResult) -> pd.DataFrame:
    return pd.DataFrame(
        [{"lag": result.lag, "alpha": result.alpha, "n": result.n, "x_name": result.x_name, "y_name": result.y_name}]
    )
