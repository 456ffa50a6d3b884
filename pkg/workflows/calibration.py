"""
Size and power calibration of the Granger F-test against simulated VAR data.
Replication r uses seed spec.seed + r, so replications are independent
streams and may run on any number of threads.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

from engine.settings import resolve_threads
from engine.simulation import simulate
from models.errors import InvalidParameter
from models.models import DfConvention, Direction, VarSpec
from workflows.granger import check_lag, directional_test

logger = logging.getLogger(__name__)


def replication_p_value(
    spec: VarSpec,
    replication: int,
    lag: int,
    direction: Direction,
    df_convention: DfConvention = DfConvention.SYSTEM,
) -> float:
    table = simulate(spec.with_seed(spec.seed + replication))
    x_name, y_name = spec.names
    x, y = table.column(x_name), table.column(y_name)
    if direction == Direction.X_TO_Y:
        return directional_test(x, y, lag, x_name, y_name, df_convention).p_value
    return directional_test(y, x, lag, y_name, x_name, df_convention).p_value


def rejection_rate(
    spec: VarSpec,
    replications: int,
    lag: int,
    alpha: float,
    direction: Direction = Direction.X_TO_Y,
    df_convention: DfConvention = DfConvention.SYSTEM,
    threads: Optional[int] = 1,
) -> float:
    """Fraction of replications in which `direction` is declared significant (p < alpha)."""
    if replications < 1:
        raise InvalidParameter("replications", replications, "need at least one replication")
    if not 0.0 <= alpha <= 1.0:
        raise InvalidParameter("alpha", alpha, "must lie in [0, 1]")
    direction = Direction(direction)
    lag = check_lag(lag, spec.n_obs)
    threads = resolve_threads(threads)

    def run(replication: int) -> float:
        return replication_p_value(spec, replication, lag, direction, df_convention)

    if threads == 1:
        p_values = [run(r) for r in range(replications)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            p_values = list(pool.map(run, range(replications)))

    rate = sum(p < alpha for p in p_values) / replications
    logger.info("rejection rate %s lag=%d alpha=%g over %d replications: %.4f", direction.value, lag, alpha, replications, rate)
    return rate
