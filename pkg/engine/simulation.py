"""
VAR Simulation
==============
Purpose: Synthetic bivariate VAR(p) data with known coefficients
Features:
- Pinned, counter-based SplitMix64 generator; output i of stream `seed`
  depends only on (seed, i), so anchors survive reimplementation
- Gaussian draws: cosine branch of Box-Muller on consecutive uniform pairs
- Contemporaneous correlation through a 2 x 2 Cholesky mix
- Zero initial conditions, burn-in discarded
"""

import logging
import math

import numpy as np

from models.models import SeriesTable, VarSpec

logger = logging.getLogger(__name__)

SPLITMIX_GAMMA = np.uint64(0x9E3779B97F4A7C15)
SPLITMIX_MUL1 = np.uint64(0xBF58476D1CE4E5B9)
SPLITMIX_MUL2 = np.uint64(0x94D049BB133111EB)
_UINT64_MASK = (1 << 64) - 1


def splitmix64(seed: int, count: int) -> np.ndarray:
    """First `count` SplitMix64 outputs of the stream started at `seed`."""
    state = np.uint64(seed & _UINT64_MASK)
    counter = np.arange(1, count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = state + counter * SPLITMIX_GAMMA
        z = (z ^ (z >> np.uint64(30))) * SPLITMIX_MUL1
        z = (z ^ (z >> np.uint64(27))) * SPLITMIX_MUL2
    return z ^ (z >> np.uint64(31))


def uniform(seed: int, count: int) -> np.ndarray:
    """Uniforms on the open interval (0, 1) from the top 53 bits."""
    bits = splitmix64(seed, count) >> np.uint64(11)
    return (bits.astype(np.float64) + 0.5) * 2.0 ** -53


def standard_normal(seed: int, count: int) -> np.ndarray:
    u = uniform(seed, 2 * count).reshape(count, 2)
    return np.sqrt(-2.0 * np.log(u[:, 0])) * np.cos(2.0 * math.pi * u[:, 1])


def innovations(spec: VarSpec) -> np.ndarray:
    """(burn_in + n_obs) x 2 correlated errors, column 0 for y and column 1 for x."""
    steps = spec.burn_in + spec.n_obs
    z = standard_normal(spec.seed, 2 * steps).reshape(steps, 2)
    rho = spec.noise_corr
    e_y = spec.noise_sd[0] * z[:, 0]
    e_x = spec.noise_sd[1] * (rho * z[:, 0] + math.sqrt(1.0 - rho * rho) * z[:, 1])
    return np.column_stack([e_y, e_x])


def simulate(spec: VarSpec) -> SeriesTable:
    """Iterate both VAR equations forward and return the last n_obs rows as (x, y)."""
    p = spec.lag
    steps = spec.burn_in + spec.n_obs
    errors = innovations(spec).tolist()
    own_y, own_x = spec.own_coeffs
    cross_y, cross_x = spec.cross_coeffs
    a_y, a_x = spec.intercepts

    y = [0.0] * (steps + p)
    x = [0.0] * (steps + p)
    for t in range(p, steps + p):
        e_y, e_x = errors[t - p]
        next_y = a_y + e_y
        next_x = a_x + e_x
        for i in range(1, p + 1):
            next_y += own_y[i - 1] * y[t - i] + cross_y[i - 1] * x[t - i]
            next_x += own_x[i - 1] * x[t - i] + cross_x[i - 1] * y[t - i]
        y[t] = next_y
        x[t] = next_x

    start = p + spec.burn_in
    logger.debug("simulated VAR(%d) seed=%d n_obs=%d burn_in=%d", p, spec.seed, spec.n_obs, spec.burn_in)
    return SeriesTable(names=spec.names, columns=(x[start:], y[start:]))
