"""
Golden values on the quarterly Canadian macroeconomic data (1980Q1-2000Q4,
columns e, prod, rw, U). Skipped unless the CSV export is available.
"""
import pytest

from cli.commands import run_cli
from workflows.granger import granger_test_columns
from workflows.lag_select import granger_lag_select_columns
from workflows.search import granger_search

# (cause, effect, printed p-value, one unit in its last printed digit)
SIGNIFICANT_AT_LAG_2 = [
    ("e", "U", 3e-7, 1e-7),
    ("prod", "rw", 0.0003, 1e-4),
    ("e", "prod", 0.0127, 1e-4),
    ("rw", "U", 0.0387, 1e-4),
]
INSIGNIFICANT_AT_LAG_2 = [
    ("prod", "U", 0.0784, 1e-4),
    ("U", "rw", 0.196, 1e-3),
    ("rw", "prod", 0.246, 1e-3),
    # the printed U -> e value sits between the df conventions (0.294-0.297 vs 0.298)
    ("U", "e", 0.298, 5e-3),
]


def assert_listing(rows, expected):
    assert [(r.cause, r.effect) for r in rows] == [(c, e) for c, e, _, _ in expected]
    for row, (_, _, p, unit) in zip(rows, expected):
        assert row.p_value == pytest.approx(p, abs=unit)


def test_table_shape(canada_table):
    assert canada_table.names == ("e", "prod", "rw", "U")
    assert canada_table.n_obs == 84


def test_pair_at_lag_2(canada_table):
    result = granger_test_columns(canada_table, "e", "U", lag=2)
    assert result.n == 84
    assert result.test_statistic_xy == pytest.approx(16.7, abs=0.05)
    assert result.p_value_xy <= 1e-6
    assert result.x_causes_y
    assert result.test_statistic_yx == pytest.approx(1.23, abs=0.01)
    assert result.p_value_yx == pytest.approx(0.298, abs=0.005)
    assert not result.y_causes_x


def test_search_at_lag_2(canada_table):
    result = granger_search(canada_table, lags=[2], threads=1)
    assert_listing(result.rows, SIGNIFICANT_AT_LAG_2)


def test_full_listing_at_lag_2(canada_table):
    result = granger_search(canada_table, lags=[2], include_insignificant=True, threads=1)
    assert len(result.rows) == 12
    assert_listing(result.rows[:8], SIGNIFICANT_AT_LAG_2 + INSIGNIFICANT_AT_LAG_2)


def test_search_over_lags_keeps_lag_2(canada_table):
    result = granger_search(canada_table, lags=range(1, 5), threads=1)
    assert [(r.cause, r.effect) for r in result.rows] == [(c, e) for c, e, _, _ in SIGNIFICANT_AT_LAG_2]
    assert all(row.lag == 2 for row in result.rows)


def test_lag_scan(canada_table):
    scan = granger_lag_select_columns(canada_table, "e", "U", lags=range(1, 9))
    assert scan.n_significant_xy == 8
    assert scan.n_significant_yx == 0
    assert scan.best_lag_xy == 2
    assert scan.best_p_xy <= 1e-6
    assert scan.best_lag_yx == 1
    assert scan.best_p_yx == pytest.approx(0.1652, abs=0.002)


def test_cli_text(canada_path, capsys):
    assert run_cli(["test", str(canada_path), "--x", "e", "--y", "U", "--lag", "2"]) == 0
    out = capsys.readouterr().out
    assert "Observations: 84, Lag order: 2, Significance level: 0.050" in out
    assert "e -> U: e Granger-causes U (p = 0.0000)" in out
    assert "U -> e: U does not Granger-cause e (p = 0.29" in out
