from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from models.errors import (
    DuplicateColumn,
    InsufficientData,
    InvalidLag,
    InvalidParameter,
    MissingOutputPath,
    NonFiniteValue,
    NonStationarySpec,
    UnknownColumn,
)


# ============================================================================
# BASE MODEL CLASSES
# ============================================================================

### START: FrozenModel ###
"""
Frozen Model Base Class
=======================
Purpose: Immutable base for every value object in the library
Features:
- Fields cannot be reassigned after validation
- numpy arrays are accepted as field types
- Safe to share across worker threads for read-only access
Use Case: Base class for tables, designs, fits and results
"""
class FrozenModel(BaseModel):
    """Immutable pydantic model that may hold numpy arrays."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)
### END: FrozenModel ###


def _readonly(values, name: str) -> np.ndarray:
    array = np.array(values, dtype=np.float64, copy=True)
    if array.ndim != 1:
        raise InvalidParameter(name, array.shape, "expected a one-dimensional series")
    array.setflags(write=False)
    return array


# ============================================================================
# ENUMS
# ============================================================================

### START: DfConvention ###
"""
DfConvention Enum
=================
Purpose: Choose the denominator degrees of freedom of the F reference distribution
Supported Conventions:
- SYSTEM: K * (N_eff - K*p - 1), K = 2; the denominator df of the
  VAR-system Wald F
- EFFECTIVE: N_eff - 2p - 1, the single-equation residual df
- RAW: T - 2p - 1, using the raw observation count
Usage: The F statistic itself never changes, only its p-value
"""
class DfConvention(str, Enum):
    """Denominator df conventions for the Granger F-test."""
    SYSTEM = "system"
    EFFECTIVE = "effective"
    RAW = "raw"
### END: DfConvention ###


class Adjustment(str, Enum):
    """Multiple-testing adjustment applied across searched pairs."""
    NONE = "none"
    BONFERRONI = "bonferroni"
    BH = "bh"


class Direction(str, Enum):
    """Test direction within a (x, y) pair."""
    X_TO_Y = "x_to_y"
    Y_TO_X = "y_to_x"


class OutputFormat(str, Enum):
    """Output formats understood by the report renderers."""
    TEXT = "text"
    CSV = "csv"
    JSON = "json"
    SVG = "svg"


# ============================================================================
# SERIES MODELS
# ============================================================================

### START: SeriesTable ###
"""
SeriesTable Model
=================
Purpose: Named, equal-length, finite numeric columns; the input dataset
Features:
- Column order is preserved from the source
- Columns are stored as read-only float64 arrays
- Exact, case-sensitive column lookup
Attributes:
- names: ordered, unique, non-empty column identifiers
- columns: one array per name, all of length n_obs >= 1
"""
class SeriesTable(FrozenModel):
    names: Tuple[str, ...]
    columns: Tuple[np.ndarray, ...]

    @field_validator("columns", mode="before")
    @classmethod
    def _freeze_columns(cls, value):
        return tuple(_readonly(column, "column") for column in value)

    @model_validator(mode="after")
    def _check_shape(self) -> "SeriesTable":
        if len(self.names) != len(self.columns):
            raise InvalidParameter("names", len(self.names), f"expected {len(self.columns)} names")
        if not self.columns:
            raise InvalidParameter("columns", 0, "a table needs at least one column")
        seen = set()
        for name in self.names:
            if not name:
                raise InvalidParameter("names", name, "column names must be non-empty")
            if name in seen:
                raise DuplicateColumn(name)
            seen.add(name)
        lengths = {len(column) for column in self.columns}
        if len(lengths) != 1:
            raise InvalidParameter("columns", sorted(lengths), "all columns must have the same length")
        if lengths.pop() < 1:
            raise InvalidParameter("columns", 0, "a table needs at least one observation")
        for name, column in zip(self.names, self.columns):
            if not np.all(np.isfinite(column)):
                raise NonFiniteValue(name)
        return self

    @classmethod
    def from_dict(cls, data: Dict[str, object]) -> "SeriesTable":
        return cls(names=tuple(data.keys()), columns=tuple(data.values()))

    @property
    def n_obs(self) -> int:
        return len(self.columns[0])

    def column(self, name: str) -> np.ndarray:
        try:
            return self.columns[self.names.index(name)]
        except ValueError:
            raise UnknownColumn(name, list(self.names)) from None

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({name: column for name, column in zip(self.names, self.columns)})
### END: SeriesTable ###


class LoadReport(BaseModel):
    """What load_csv kept and what it dropped."""
    source: str
    n_rows: int
    numeric_columns: List[str]
    dropped_columns: List[str] = []


# ============================================================================
# LEAST-SQUARES MODELS
# ============================================================================

### START: LagDesign ###
"""
LagDesign Model
===============
Purpose: Response vector and lagged predictor matrix of one VAR equation
Features:
- Row t holds observation t + p of the raw series
- Column order: intercept, own lags 1..p, then cross lags 1..p
- Restricted designs omit the cross block
Attributes:
- response: length n_eff = T - p
- predictors: n_eff x m, first column all ones
- lag: lag order p
"""
class LagDesign(FrozenModel):
    response: np.ndarray
    predictors: np.ndarray
    lag: int

    @model_validator(mode="after")
    def _check_design(self) -> "LagDesign":
        if self.lag < 1:
            raise InvalidLag(self.lag)
        rows, cols = self.predictors.shape
        if self.response.shape != (rows,):
            raise InvalidParameter("response", self.response.shape, f"expected ({rows},)")
        if rows <= cols:
            raise InsufficientData(rows + self.lag, self.lag, cols)
        if not np.all(self.predictors[:, 0] == 1.0):
            raise InvalidParameter("predictors", "column 0", "first predictor column must be the intercept")
        return self

    @property
    def n_eff(self) -> int:
        return self.predictors.shape[0]

    @property
    def n_params(self) -> int:
        return self.predictors.shape[1]
### END: LagDesign ###


### START: VarFit ###
"""
VarFit Model
============
Purpose: One fitted least-squares equation
Attributes:
- coefficients: intercept, own lags, cross lags
- residuals: response minus fitted values
- rss: residual sum of squares
- sigma2: rss / n_eff, the residual variance
"""
class VarFit(FrozenModel):
    coefficients: np.ndarray
    residuals: np.ndarray
    rss: float = Field(ge=0.0)
    n_eff: int
    n_params: int

    @property
    def sigma2(self) -> float:
        return self.rss / self.n_eff
### END: VarFit ###


class FParams(BaseModel):
    """Degrees of freedom of an F distribution."""
    model_config = ConfigDict(frozen=True)

    d1: int = Field(ge=1)
    d2: int = Field(ge=1)


# ============================================================================
# GRANGER TEST MODELS
# ============================================================================

### START: DirectionalTest ###
"""
DirectionalTest Model
=====================
Purpose: One direction (cause -> effect) of a Granger F-test at one lag
Features:
- Shared by the pair test, the exhaustive search, the lag scan and the
  calibration harness, so all of them agree bit-for-bit
Attributes:
- statistic: ((RSS_R - RSS_U) / p) / (RSS_U / (N_eff - 2p - 1))
- df_num, df_den: reference F distribution
- rss_restricted, rss_unrestricted: the two fitted RSS values
"""
class DirectionalTest(FrozenModel):
    cause: str
    effect: str
    lag: int
    statistic: float = Field(ge=0.0)
    p_value: float = Field(ge=0.0, le=1.0)
    df_num: int
    df_den: int
    rss_restricted: float
    rss_unrestricted: float
    n_eff: int
### END: DirectionalTest ###


### START: GrangerResult ###
"""
GrangerResult Model
===================
Purpose: Both-direction Granger causality outcome for one pair
Features:
- Boolean verdicts follow strictly p < alpha
- n is the raw observation count, df use the effective sample
Attributes:
- x_name, y_name: variable names
- lag, alpha, n: test settings
- x_causes_y / y_causes_x: verdicts
- p_value_xy / p_value_yx, test_statistic_xy / test_statistic_yx
- df_num, df_den, df_convention: reference distribution
"""
class GrangerResult(FrozenModel):
    x_name: str
    y_name: str
    lag: int = Field(ge=1)
    alpha: float = Field(gt=0.0, lt=1.0)
    n: int
    test: str = "F"
    x_causes_y: bool
    y_causes_x: bool
    p_value_xy: float = Field(ge=0.0, le=1.0)
    p_value_yx: float = Field(ge=0.0, le=1.0)
    test_statistic_xy: float = Field(ge=0.0)
    test_statistic_yx: float = Field(ge=0.0)
    df_num: int
    df_den: int
    df_convention: DfConvention = DfConvention.SYSTEM

    @model_validator(mode="after")
    def _check_verdicts(self) -> "GrangerResult":
        if self.n <= 3 * self.lag + 1:
            raise InsufficientData(self.n, self.lag, 1 + 2 * self.lag)
        if self.x_causes_y != (self.p_value_xy < self.alpha):
            raise InvalidParameter("x_causes_y", self.x_causes_y, "must equal p_value_xy < alpha")
        if self.y_causes_x != (self.p_value_yx < self.alpha):
            raise InvalidParameter("y_causes_x", self.y_causes_x, "must equal p_value_yx < alpha")
        return self
### END: GrangerResult ###


# ============================================================================
# SEARCH MODELS
# ============================================================================

class SearchRow(FrozenModel):
    """One directed pair retained by the search."""
    cause: str
    effect: str
    statistic: float = Field(ge=0.0)
    p_value: float = Field(ge=0.0, le=1.0)
    p_adjusted: Optional[float] = None
    lag: int = Field(ge=1)
    significant: bool

    @property
    def decision_p(self) -> float:
        return self.p_value if self.p_adjusted is None else self.p_adjusted


### START: SearchResult ###
"""
SearchResult Model
==================
Purpose: Ordered directed-pair rows of an exhaustive search plus metadata
Features:
- rows: what the caller asked for (significant only unless
  include_insignificant), sorted by decision p-value then (cause, effect)
- all_rows: every retained pair in the same order, used by the matrix view
Attributes:
- variables, lags_tested, alpha, adjustment, n (raw observation count)
- pairs_examined: K * (K - 1)
"""
class SearchResult(FrozenModel):
    rows: Tuple[SearchRow, ...]
    all_rows: Tuple[SearchRow, ...]
    variables: Tuple[str, ...]
    lags_tested: Tuple[int, ...]
    alpha: float
    adjustment: Adjustment = Adjustment.NONE
    include_insignificant: bool = False
    n: int

    @property
    def pairs_examined(self) -> int:
        k = len(self.variables)
        return k * (k - 1)

    @property
    def n_significant(self) -> int:
        return sum(row.significant for row in self.all_rows)

    def to_frame(self) -> pd.DataFrame:
        columns = ["cause", "effect", "statistic", "p_value", "p_adjusted", "lag", "significant"]
        return pd.DataFrame([row.model_dump() for row in self.rows], columns=columns)
### END: SearchResult ###


class MatrixCell(FrozenModel):
    p_value: float
    significant: bool
    lag: int


class CausalityMatrix(FrozenModel):
    """K x K grid; cell (i, j) tests variable i causing variable j."""
    variables: Tuple[str, ...]
    cells: Tuple[Tuple[Optional[MatrixCell], ...], ...]
    alpha: float

    def cell(self, cause: str, effect: str) -> Optional[MatrixCell]:
        for name in (cause, effect):
            if name not in self.variables:
                raise UnknownColumn(name, list(self.variables))
        return self.cells[self.variables.index(cause)][self.variables.index(effect)]

    def to_frame(self) -> pd.DataFrame:
        values = [[None if c is None else c.p_value for c in row] for row in self.cells]
        return pd.DataFrame(values, index=list(self.variables), columns=list(self.variables), dtype=float)


# ============================================================================
# LAG SCAN MODELS
# ============================================================================

class LagScanRow(FrozenModel):
    """Both directions at one lag plus the VAR(p) information criteria."""
    lag: int
    statistic_xy: float
    p_value_xy: float
    significant_xy: bool
    statistic_yx: float
    p_value_yx: float
    significant_yx: bool
    aic: float
    bic: float


### START: LagScanResult ###
"""
LagScanResult Model
===================
Purpose: One pair's bidirectional tests across a range of lag orders
Features:
- Best lag per direction by minimum p-value, smallest lag on ties
- Counts of significant lags per direction
- AIC / BIC preferred lags
Attributes:
- x_name, y_name, alpha
- lags: strictly increasing lag orders
- per_lag: one LagScanRow per lag, in lag order
"""
class LagScanResult(FrozenModel):
    x_name: str
    y_name: str
    lags: Tuple[int, ...]
    per_lag: Tuple[LagScanRow, ...]
    alpha: float
    n: int
    best_lag_xy: int
    best_lag_yx: int
    n_significant_xy: int
    n_significant_yx: int

    @model_validator(mode="after")
    def _check_lags(self) -> "LagScanResult":
        if len(self.per_lag) != len(self.lags) or not self.lags:
            raise InvalidParameter("per_lag", len(self.per_lag), f"expected {len(self.lags)} rows")
        if any(b <= a for a, b in zip(self.lags, self.lags[1:])):
            raise InvalidParameter("lags", self.lags, "lags must be strictly increasing")
        return self

    def row(self, lag: int) -> LagScanRow:
        return self.per_lag[self.lags.index(lag)]

    @property
    def best_p_xy(self) -> float:
        return self.row(self.best_lag_xy).p_value_xy

    @property
    def best_p_yx(self) -> float:
        return self.row(self.best_lag_yx).p_value_yx

    @property
    def aic_lag(self) -> int:
        return min(self.per_lag, key=lambda r: (r.aic, r.lag)).lag

    @property
    def bic_lag(self) -> int:
        return min(self.per_lag, key=lambda r: (r.bic, r.lag)).lag

    def p_value_curve(self) -> List[Tuple[int, float, float]]:
        return [(r.lag, r.p_value_xy, r.p_value_yx) for r in self.per_lag]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([r.model_dump() for r in self.per_lag])
### END: LagScanResult ###


# ============================================================================
# SIMULATION MODELS
# ============================================================================

### START: VarSpec ###
"""
VarSpec Model
=============
Purpose: Known-coefficient bivariate VAR(p) used as a test oracle
Features:
- Equation 1 (y): y_t = a1 + sum own[0][i] y_{t-i} + sum cross[0][i] x_{t-i} + e1
- Equation 2 (x): x_t = a2 + sum own[1][i] x_{t-i} + sum cross[1][i] y_{t-i} + e2
- Stationarity is enforced at construction via the companion matrix
Attributes:
- lag, intercepts, own_coeffs, cross_coeffs (2 x lag each)
- noise_sd, noise_corr: innovation scales and correlation
- n_obs, seed, burn_in, names (x column first)
"""
class VarSpec(FrozenModel):
    lag: int = Field(ge=1)
    intercepts: Tuple[float, float] = (0.0, 0.0)
    own_coeffs: Tuple[Tuple[float, ...], Tuple[float, ...]]
    cross_coeffs: Tuple[Tuple[float, ...], Tuple[float, ...]]
    noise_sd: Tuple[float, float] = (1.0, 1.0)
    noise_corr: float = Field(default=0.0, gt=-1.0, lt=1.0)
    n_obs: int = Field(ge=1)
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    burn_in: int = Field(default=100, ge=0)
    names: Tuple[str, str] = ("x", "y")

    @model_validator(mode="after")
    def _check_spec(self) -> "VarSpec":
        for field, block in (("own_coeffs", self.own_coeffs), ("cross_coeffs", self.cross_coeffs)):
            if any(len(eq) != self.lag for eq in block):
                raise InvalidParameter(field, block, f"each equation needs exactly {self.lag} coefficients")
        if min(self.noise_sd) <= 0.0:
            raise InvalidParameter("noise_sd", self.noise_sd, "standard deviations must be positive")
        if self.names[0] == self.names[1] or not all(self.names):
            raise InvalidParameter("names", self.names, "names must be distinct and non-empty")
        radius = self.spectral_radius()
        if radius >= 1.0 - 1e-9:
            raise NonStationarySpec(radius)
        return self

    def companion_matrix(self) -> np.ndarray:
        """Companion form of the (y, x) state vector."""
        p = self.lag
        companion = np.zeros((2 * p, 2 * p))
        for i in range(p):
            companion[0:2, 2 * i:2 * i + 2] = [
                [self.own_coeffs[0][i], self.cross_coeffs[0][i]],
                [self.cross_coeffs[1][i], self.own_coeffs[1][i]],
            ]
        companion[2:, :-2] = np.eye(2 * p - 2)
        return companion

    def spectral_radius(self) -> float:
        return float(np.max(np.abs(np.linalg.eigvals(self.companion_matrix()))))

    def with_seed(self, seed: int) -> "VarSpec":
        return self.model_copy(update={"seed": seed % 2 ** 64})
### END: VarSpec ###


# ============================================================================
# RENDERING MODELS
# ============================================================================

### START: RenderOptions ###
"""
RenderOptions Model
===================
Purpose: How a result is rendered and where it goes
Features:
- text, csv and json go to the returned string and optionally a file
- svg always needs an output path
Attributes:
- format, output_path
- significant_color / insignificant_color: causality-matrix cell fills
- width_px, height_px: SVG canvas size
"""
class RenderOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    format: OutputFormat = OutputFormat.TEXT
    output_path: Optional[Path] = None
    significant_color: str = "#4477AA"
    insignificant_color: str = "#CCCCCC"
    width_px: int = Field(default=900, gt=0)
    height_px: int = Field(default=480, gt=0)

    @model_validator(mode="after")
    def _svg_needs_path(self) -> "RenderOptions":
        if self.format == OutputFormat.SVG and self.output_path is None:
            raise MissingOutputPath(self.format.value)
        return self
### END: RenderOptions ###
