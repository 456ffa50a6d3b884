import logging
import os
from typing import Optional

from pydantic import BaseModel, Field

from models.errors import InvalidParameter

THREADS_ENV = "GRANGER_THREADS"
LOG_LEVEL_ENV = "GRANGER_LOG_LEVEL"


### START: RuntimeSettings ###
"""
Runtime Settings Model
======================
Purpose: Process-wide knobs read from the environment
Features:
- GRANGER_THREADS caps search, lag scan and calibration parallelism
- GRANGER_LOG_LEVEL sets the CLI logging level by name
- Explicit arguments always win over the environment
Use Case: Resolved once by the CLI, passed down explicitly
"""
class RuntimeSettings(BaseModel):
    threads: int = Field(default_factory=lambda: os.cpu_count() or 1, ge=1)
    log_level: int = logging.WARNING

    @classmethod
    def from_env(cls, threads: Optional[int] = None, log_level: Optional[int] = None) -> "RuntimeSettings":
        values = {}
        raw_threads = os.getenv(THREADS_ENV)
        if threads is not None:
            values["threads"] = threads
        elif raw_threads:
            try:
                values["threads"] = int(raw_threads)
            except ValueError:
                raise InvalidParameter(THREADS_ENV, raw_threads, "expected a positive integer") from None
            if values["threads"] < 1:
                raise InvalidParameter(THREADS_ENV, raw_threads, "expected a positive integer")

        raw_level = os.getenv(LOG_LEVEL_ENV)
        if log_level is not None:
            values["log_level"] = log_level
        elif raw_level:
            level = logging.getLevelName(raw_level.upper())
            if not isinstance(level, int):
                raise InvalidParameter(LOG_LEVEL_ENV, raw_level, "expected DEBUG, INFO, WARNING or ERROR")
            values["log_level"] = level
        return cls(**values)
### END: RuntimeSettings ###


def resolve_threads(threads: Optional[int]) -> int:
    """Worker count for library calls that were not given one explicitly."""
    if threads is not None:
        if threads < 1:
            raise InvalidParameter("threads", threads, "expected a positive integer")
        return threads
    return RuntimeSettings.from_env().threads
