"""
Lag-order sensitivity of a pair's Granger tests, with VAR(p) AIC and BIC
per lag. Each lag is fitted on its own maximal sample (N_eff = T - p).
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, Optional, Tuple

import numpy as np

from engine.ols import build_lag_design, fit_ols
from engine.settings import resolve_threads
from models.errors import InsufficientData, LengthMismatch, SingularCovariance
from models.models import DfConvention, LagScanResult, LagScanRow, SeriesTable
from workflows.granger import N_VARIABLES, as_series, check_alpha, check_test, directional_test
from workflows.search import normalize_lags

logger = logging.getLogger(__name__)

SINGULAR_DETERMINANT = 1e-300


def information_criteria(x, y, lag: int) -> Tuple[float, float]:
    """(AIC, BIC) of the bivariate VAR(lag) from its ML residual covariance."""
    y_fit = fit_ols(build_lag_design(y, x, lag))
    x_fit = fit_ols(build_lag_design(x, y, lag))
    n_eff = y_fit.n_eff
    residuals = np.column_stack([y_fit.residuals, x_fit.residuals])
    covariance = residuals.T @ residuals / n_eff

    sign, log_det = np.linalg.slogdet(covariance)
    if sign <= 0 or log_det <= math.log(SINGULAR_DETERMINANT):
        raise SingularCovariance(lag)
    penalty = lag * N_VARIABLES ** 2
    aic = log_det + 2.0 * penalty / n_eff
    bic = log_det + penalty * math.log(n_eff) / n_eff
    return float(aic), float(bic)


def _best_lag(rows, attribute: str) -> int:
    return min(rows, key=lambda row: (getattr(row, attribute), row.lag)).lag


def granger_lag_select(
    x,
    y,
    lags: Iterable[int] = range(1, 5),
    alpha: float = 0.05,
    test: str = "F",
    x_name: str = "x",
    y_name: str = "y",
    df_convention: DfConvention = DfConvention.SYSTEM,
    threads: Optional[int] = None,
) -> LagScanResult:
    """Granger tests in both directions at every lag in `lags`."""
    check_test(test)
    alpha = check_alpha(alpha)
    df_convention = DfConvention(df_convention)
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(x) != len(y):
        raise LengthMismatch(len(x), len(y))
    lags = normalize_lags(lags)
    n_obs = len(x)
    # Both equations share 2p+1 regressors; one more row keeps the residual covariance full rank.
    offending = [lag for lag in lags if n_obs <= 3 * lag + 2]
    if offending:
        raise InsufficientData(n_obs, offending[-1], 2 + 2 * offending[-1])
    threads = resolve_threads(threads)
    x = as_series(x, x_name)
    y = as_series(y, y_name)

    def evaluate(lag: int) -> LagScanRow:
        xy = directional_test(x, y, lag, x_name, y_name, df_convention)
        yx = directional_test(y, x, lag, y_name, x_name, df_convention)
        aic, bic = information_criteria(x, y, lag)
        return LagScanRow(
            lag=lag,
            statistic_xy=xy.statistic,
            p_value_xy=xy.p_value,
            significant_xy=xy.p_value < alpha,
            statistic_yx=yx.statistic,
            p_value_yx=yx.p_value,
            significant_yx=yx.p_value < alpha,
            aic=aic,
            bic=bic,
        )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_lag = tuple(pool.map(evaluate, lags))
    else:
        per_lag = tuple(evaluate(lag) for lag in lags)
    logger.info("lag scan %s<->%s over lags %s", x_name, y_name, list(lags))

    return LagScanResult(
        x_name=x_name,
        y_name=y_name,
        lags=lags,
        per_lag=per_lag,
        alpha=alpha,
        n=n_obs,
        best_lag_xy=_best_lag(per_lag, "p_value_xy"),
        best_lag_yx=_best_lag(per_lag, "p_value_yx"),
        n_significant_xy=sum(row.significant_xy for row in per_lag),
        n_significant_yx=sum(row.significant_yx for row in per_lag),
    )


def granger_lag_select_columns(table: SeriesTable, x: str, y: str, **kwargs) -> LagScanResult:
    """granger_lag_select on two named columns of a table."""
    return granger_lag_select(table.column(x), table.column(y), x_name=x, y_name=y, **kwargs)
