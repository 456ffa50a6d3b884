from typing import Optional


# ============================================================================
# BASE ERROR CLASSES
# ============================================================================

### START: GrangerError ###
"""
Granger Error Base Class
========================
Purpose: Root of every error raised by the library
Features:
- Carries a process exit code for the command-line front end
- Deliberately not a ValueError, so raising it inside a pydantic
  validator propagates unchanged instead of becoming a ValidationError
Use Case: `except GrangerError` around any library call
"""
class GrangerError(Exception):
    """Base class for all grangersearch errors."""
    exit_code: int = 1
### END: GrangerError ###


class UsageError(GrangerError):
    """Bad arguments: unknown names, invalid parameters, unsupported options."""
    exit_code = 2


class DataError(GrangerError):
    """Input data that cannot be used as given."""


class ComputeError(GrangerError):
    """Numerical failure while fitting or evaluating."""


# ============================================================================
# USAGE ERRORS
# ============================================================================

class InvalidParameter(UsageError):
    def __init__(self, name: str, value: object, reason: str):
        self.name = name
        self.value = value
        super().__init__(f"invalid {name}={value!r}: {reason}")


class InvalidLag(InvalidParameter):
    def __init__(self, lag: object):
        self.lag = lag
        super().__init__("lag", lag, "lag order must be a positive integer")


class InvalidLagSpec(UsageError):
    def __init__(self, spec: str, reason: str):
        self.spec = spec
        super().__init__(f"bad lag spec {spec!r}: {reason}")


class UnknownColumn(UsageError):
    def __init__(self, name: str, available: Optional[list] = None):
        self.name = name
        message = f"unknown column {name!r}"
        if available:
            message += f" (available: {', '.join(available)})"
        super().__init__(message)


class DuplicateColumn(UsageError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"column {name!r} selected more than once")


class UnsupportedTest(UsageError):
    def __init__(self, test: str):
        self.test = test
        super().__init__(f"unsupported test {test!r}: only \"F\" is supported")


class UnsupportedFormat(UsageError):
    def __init__(self, fmt: str, what: str):
        self.format = fmt
        super().__init__(f"format {fmt!r} is not available for {what}")


class MissingOutputPath(UsageError):
    def __init__(self, fmt: str):
        self.format = fmt
        super().__init__(f"format {fmt!r} requires an output path (--out)")


# ============================================================================
# DATA ERRORS
# ============================================================================

class SeriesFileNotFound(DataError, FileNotFoundError):
    def __init__(self, path: str):
        self.path = path
        super().__init__(f"no such file: {path}")


class ParseError(DataError):
    def __init__(self, row: int, column: str, value: str):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(f"line {row}, column {column!r}: cannot parse {value!r} as a finite number")


class EmptyTable(DataError):
    def __init__(self, path: str, reason: str):
        self.path = path
        super().__init__(f"{path}: {reason}")


class RaggedRows(DataError):
    def __init__(self, row: Optional[int], expected: Optional[int] = None, found: Optional[int] = None):
        self.row = row
        self.expected = expected
        self.found = found
        if expected is not None and found is not None:
            super().__init__(f"line {row}: expected {expected} fields, found {found}")
        else:
            super().__init__(f"line {row}: record length differs from header")


class LengthMismatch(DataError):
    def __init__(self, x_len: int, y_len: int):
        self.x_len = x_len
        self.y_len = y_len
        super().__init__(f"series lengths differ: {x_len} vs {y_len}")


class NonFiniteValue(DataError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"series {name!r} contains missing or non-finite values")


class ConstantSeries(DataError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"series {name!r} is constant; Granger tests need variation")


class TooFewColumns(DataError):
    def __init__(self, count: int):
        self.count = count
        super().__init__(f"search needs at least 2 numeric columns, got {count}")


# ============================================================================
# COMPUTE ERRORS
# ============================================================================

class InsufficientData(ComputeError):
    def __init__(self, n_obs: int, lag: int, n_params: int):
        self.n_obs = n_obs
        self.lag = lag
        self.n_params = n_params
        super().__init__(
            f"lag {lag}: {n_obs} observations leave {n_obs - lag} usable rows, "
            f"need more than {n_params}"
        )


class RankDeficient(ComputeError):
    def __init__(self, column: int):
        self.column = column
        super().__init__(f"design matrix is rank deficient at column {column} (constant or collinear series)")


class InvalidStatistic(ComputeError):
    def __init__(self, stat: float):
        self.stat = stat
        super().__init__(f"F statistic must be finite and non-negative, got {stat!r}")


class NonConvergence(ComputeError):
    def __init__(self, what: str, iterations: int):
        self.iterations = iterations
        super().__init__(f"{what} did not converge in {iterations} iterations")


class InvalidProbability(ComputeError):
    def __init__(self, index: int, value: float):
        self.index = index
        self.value = value
        super().__init__(f"p-value #{index} = {value!r} is outside [0, 1]")


class SingularCovariance(ComputeError):
    def __init__(self, lag: int):
        self.lag = lag
        super().__init__(f"lag {lag}: residual covariance is singular (degenerate residuals)")


class NonStationarySpec(ComputeError):
    def __init__(self, radius: float):
        self.radius = radius
        super().__init__(f"companion spectral radius {radius:.6f} is not below 1; process is not stationary")


class RenderWriteError(GrangerError):
    def __init__(self, path: str, reason: str):
        self.path = path
        super().__init__(f"cannot write {path}: {reason}")
