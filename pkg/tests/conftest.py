import os
from pathlib import Path

import numpy as np
import pytest

from engine.series_store import load_csv
from models.models import SeriesTable

DATA_DIR = Path(__file__).parent / "data"
CANADA_ENV = "GRANGER_CANADA_CSV"


def _ar1(rng, n, phi=0.5):
    noise = rng.standard_normal(n)
    out = np.zeros(n)
    for t in range(1, n):
        out[t] = phi * out[t - 1] + noise[t]
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def causal_pair(rng):
    """x drives y with one period of delay; y never feeds back."""
    n = 300
    x = _ar1(rng, n)
    e = rng.standard_normal(n)
    y = np.zeros(n)
    for t in range(1, n):
        y[t] = 0.4 * y[t - 1] + 0.8 * x[t - 1] + e[t]
    return x, y


@pytest.fixture
def independent_pair(rng):
    return _ar1(rng, 300), _ar1(rng, 300)


@pytest.fixture
def chain_table(rng):
    """a -> b -> c, with d unrelated to all of them."""
    n = 400
    a = _ar1(rng, n)
    b = np.zeros(n)
    c = np.zeros(n)
    eb, ec = rng.standard_normal(n), rng.standard_normal(n)
    for t in range(1, n):
        b[t] = 0.3 * b[t - 1] + 0.9 * a[t - 1] + eb[t]
        c[t] = 0.3 * c[t - 1] + 0.9 * b[t - 1] + ec[t]
    return SeriesTable.from_dict({"a": a, "b": b, "c": c, "d": _ar1(rng, n)})


@pytest.fixture
def write_csv(tmp_path):
    """Write raw CSV text to a temporary file and return its path."""
    def _write(text: str, name: str = "series.csv") -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path
    return _write


@pytest.fixture
def table_csv(tmp_path, chain_table):
    path = tmp_path / "chain.csv"
    chain_table.to_frame().to_csv(path, index=False)
    return path


@pytest.fixture
def canada_path():
    path = Path(os.getenv(CANADA_ENV, DATA_DIR / "canada.csv"))
    if not path.exists():
        pytest.skip(f"Canada export not found at {path}; see README for the export recipe or set {CANADA_ENV}")
    return path


@pytest.fixture
def canada_table(canada_path):
    return load_csv(canada_path)
