"""
Exhaustive Pairwise Search
==========================
Purpose: Test every directed pair of a table's columns, optionally over
several lag orders, and report the pairs sorted by p-value.
Features:
- One task per (cause, effect, lag); tasks are independent and may run on
  a thread pool, results are merged in a fixed order
- Per pair, the lag with the smallest p-value is kept (smallest lag on ties)
- Optional Bonferroni or Benjamini-Hochberg adjustment across the K(K-1)
  retained pairs; the adjustment is applied after lag selection and is
  therefore anti-conservative when several lags were searched
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from itertools import permutations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from engine.series_store import select_columns
from engine.settings import resolve_threads
from models.errors import InvalidLag, InvalidParameter, InvalidProbability, TooFewColumns
from models.models import (
    Adjustment,
    CausalityMatrix,
    DfConvention,
    DirectionalTest,
    MatrixCell,
    SearchResult,
    SearchRow,
    SeriesTable,
)
from workflows.granger import as_series, check_alpha, check_lag, check_test, directional_test

logger = logging.getLogger(__name__)


def adjust_pvalues(pvals: Sequence[float], method: Adjustment) -> List[float]:
    """Multiple-testing adjusted p-values, in input order."""
    method = Adjustment(method)
    if len(pvals) == 0:
        raise InvalidParameter("pvals", pvals, "need at least one p-value")
    for index, p in enumerate(pvals):
        if not 0.0 <= p <= 1.0:
            raise InvalidProbability(index, p)
    values = np.asarray(pvals, dtype=np.float64)
    m = len(values)
    if method == Adjustment.NONE:
        return values.tolist()
    if method == Adjustment.BONFERRONI:
        return np.minimum(1.0, m * values).tolist()

    order = np.argsort(values, kind="stable")
    ranks = np.arange(1, m + 1)
    stepped = np.minimum(1.0, m * values[order] / ranks)
    stepped = np.minimum.accumulate(stepped[::-1])[::-1]
    adjusted = np.empty(m)
    adjusted[order] = stepped
    return adjusted.tolist()


def normalize_lags(lags: Iterable[int]) -> Tuple[int, ...]:
    """Sorted unique positive lag orders."""
    if isinstance(lags, (int, np.integer)):
        lags = [lags]
    values = set()
    for lag in lags:
        if isinstance(lag, bool) or not isinstance(lag, (int, np.integer)) or lag < 1:
            raise InvalidLag(lag)
        values.add(int(lag))
    if not values:
        raise InvalidParameter("lags", lags, "need at least one lag order")
    return tuple(sorted(values))


def _run_tasks(tasks, run, threads: int) -> list:
    if threads == 1 or len(tasks) <= 1:
        return [run(task) for task in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(run, tasks))


def granger_search(
    table: SeriesTable,
    columns: Optional[Sequence[str]] = None,
    lags: Iterable[int] = (1,),
    alpha: float = 0.05,
    include_insignificant: bool = False,
    adjustment: Adjustment = Adjustment.NONE,
    test: str = "F",
    df_convention: DfConvention = DfConvention.SYSTEM,
    threads: Optional[int] = None,
) -> SearchResult:
    """Granger-test all K(K-1) directed pairs of the selected columns."""
    check_test(test)
    alpha = check_alpha(alpha)
    adjustment = Adjustment(adjustment)
    df_convention = DfConvention(df_convention)
    selected = select_columns(table, columns)
    if len(selected.names) < 2:
        raise TooFewColumns(len(selected.names))

    lags = normalize_lags(lags)
    for lag in lags:
        check_lag(lag, selected.n_obs)
    series = {name: as_series(selected.column(name), name) for name in selected.names}
    threads = resolve_threads(threads)

    pairs = list(permutations(selected.names, 2))
    tasks = [(cause, effect, lag) for cause, effect in pairs for lag in lags]
    logger.info(
        "search: %d variables, %d pairs, lags %s, %d tasks on %d threads",
        len(selected.names), len(pairs), list(lags), len(tasks), threads,
    )

    def run(task) -> DirectionalTest:
        cause, effect, lag = task
        return directional_test(series[cause], series[effect], lag, cause, effect, df_convention)

    outcomes = _run_tasks(tasks, run, threads)

    best: Dict[Tuple[str, str], DirectionalTest] = {}
    for outcome in outcomes:
        key = (outcome.cause, outcome.effect)
        if key not in best or outcome.p_value < best[key].p_value:
            best[key] = outcome

    retained = [best[pair] for pair in pairs]
    if adjustment == Adjustment.NONE:
        adjusted: List[Optional[float]] = [None] * len(retained)
    else:
        adjusted = adjust_pvalues([t.p_value for t in retained], adjustment)

    all_rows = []
    for outcome, p_adjusted in zip(retained, adjusted):
        decision = outcome.p_value if p_adjusted is None else p_adjusted
        all_rows.append(
            SearchRow(
                cause=outcome.cause,
                effect=outcome.effect,
                statistic=outcome.statistic,
                p_value=outcome.p_value,
                p_adjusted=p_adjusted,
                lag=outcome.lag,
                significant=decision < alpha,
            )
        )
    all_rows.sort(key=lambda row: (row.decision_p, row.cause, row.effect))
    rows = all_rows if include_insignificant else [row for row in all_rows if row.significant]

    logger.info("search: %d of %d pairs significant at alpha=%g", sum(r.significant for r in all_rows), len(all_rows), alpha)
    return SearchResult(
        rows=tuple(rows),
        all_rows=tuple(all_rows),
        variables=selected.names,
        lags_tested=lags,
        alpha=alpha,
        adjustment=adjustment,
        include_insignificant=include_insignificant,
        n=selected.n_obs,
    )


def causality_matrix(result: SearchResult) -> CausalityMatrix:
    """K x K view of the search; row variables cause column variables."""
    lookup = {(row.cause, row.effect): row for row in result.all_rows}
    cells = []
    for cause in result.variables:
        line = []
        for effect in result.variables:
            row = lookup.get((cause, effect))
            line.append(None if row is None else MatrixCell(p_value=row.decision_p, significant=row.significant, lag=row.lag))
        cells.append(tuple(line))
    return CausalityMatrix(variables=result.variables, cells=tuple(cells), alpha=result.alpha)
