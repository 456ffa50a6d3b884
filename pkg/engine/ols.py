"""
Least-Squares Engine
====================
Purpose: Lagged design construction and single-equation OLS fits
Features:
- Restricted (own lags) and unrestricted (own + cross lags) VAR equations
  built on the same T - p rows
- Householder QR without column pivoting; rank checked on the
  R diagonal of the column-equilibrated design
"""

import logging
from typing import Optional, Tuple

import numpy as np

from models.errors import InsufficientData, InvalidLag, LengthMismatch, RankDeficient
from models.models import LagDesign, VarFit

logger = logging.getLogger(__name__)

RANK_TOLERANCE = 1e-10


def build_lag_design(y, x=None, lag: int = 1) -> LagDesign:
    """Design for y_t on [1, y_{t-1..t-p}] and, when x is given, x_{t-1..t-p}."""
    if isinstance(lag, bool) or not isinstance(lag, (int, np.integer)) or lag < 1:
        raise InvalidLag(lag)
    lag = int(lag)
    y = np.asarray(y, dtype=np.float64)
    if x is not None:
        x = np.asarray(x, dtype=np.float64)
        if len(x) != len(y):
            raise LengthMismatch(len(x), len(y))

    n_obs = len(y)
    n_params = 1 + lag if x is None else 1 + 2 * lag
    n_eff = n_obs - lag
    if n_eff <= n_params:
        raise InsufficientData(n_obs, lag, n_params)

    blocks = [np.ones(n_eff)]
    blocks += [y[lag - i:n_obs - i] for i in range(1, lag + 1)]
    if x is not None:
        blocks += [x[lag - i:n_obs - i] for i in range(1, lag + 1)]
    predictors = np.column_stack(blocks)
    predictors.setflags(write=False)
    response = y[lag:].copy()
    response.setflags(write=False)
    return LagDesign(response=response, predictors=predictors, lag=lag)


def householder_qr(matrix: np.ndarray, rhs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Reduce `matrix` to upper-triangular R, applying the same reflections to `rhs`.

    Returns (R, Q^T rhs) with R of shape (m, m).
    """
    a = np.array(matrix, dtype=np.float64, copy=True)
    b = np.array(rhs, dtype=np.float64, copy=True)
    rows, cols = a.shape
    for j in range(cols):
        column = a[j:, j]
        norm = np.linalg.norm(column)
        if norm == 0.0:
            continue
        alpha = -norm if column[0] >= 0.0 else norm
        v = column.copy()
        v[0] -= alpha
        v_norm = np.linalg.norm(v)
        if v_norm == 0.0:
            continue
        v /= v_norm
        a[j:, j:] -= 2.0 * np.outer(v, v @ a[j:, j:])
        b[j:] -= 2.0 * v * (v @ b[j:])
        a[j + 1:, j] = 0.0
    return np.triu(a[:cols, :cols]), b


def back_substitute(r: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    n = r.shape[0]
    solution = np.zeros(n)
    for i in range(n - 1, -1, -1):
        solution[i] = (rhs[i] - r[i, i + 1:] @ solution[i + 1:]) / r[i, i]
    return solution


def fit_ols(design: LagDesign) -> VarFit:
    """Least-squares fit of design.response on design.predictors."""
    predictors = design.predictors
    scale = np.linalg.norm(predictors, axis=0)
    zero = np.flatnonzero(scale == 0.0)
    if zero.size:
        raise RankDeficient(int(zero[0]))

    r, qtb = householder_qr(predictors / scale, design.response)
    pivots = np.abs(np.diag(r))
    small = np.flatnonzero(pivots < RANK_TOLERANCE * pivots.max())
    if small.size:
        raise RankDeficient(int(small[0]))

    coefficients = back_substitute(r, qtb[:design.n_params]) / scale
    residuals = design.response - predictors @ coefficients
    rss = float(residuals @ residuals)
    coefficients.setflags(write=False)
    residuals.setflags(write=False)
    logger.debug("fit lag=%d n_eff=%d m=%d rss=%.6g", design.lag, design.n_eff, design.n_params, rss)
    return VarFit(
        coefficients=coefficients,
        residuals=residuals,
        rss=rss,
        n_eff=design.n_eff,
        n_params=design.n_params,
    )


def fit_pair(y, x: Optional[np.ndarray], lag: int) -> VarFit:
    return fit_ols(build_lag_design(y, x, lag))
