# rwa.py
import math
from dataclasses import dataclass

import numpy as np

from errors import ConfigError
from models import make_series, oscillation_sum
from utils import setup_logger

logger = setup_logger(__name__)

SQRT_HALF = 1.0 / math.sqrt(2.0)


def check_branch(k):
    if k not in (1, 2):
        raise ConfigError(f"Branch index k must be 1 or 2, got {k}")
    return -1.0 if k == 1 else 1.0


@dataclass(frozen=True)
class RwaLevel:
    k: int
    n: int
    energy: float


def rwa_energy(k, n, g):
    """E_kn = n + 1/2 + (-1)^k sqrt(n+1) g. n may be an array."""
    sign = check_branch(k)
    n = np.asarray(n, dtype=float)
    energy = n + 0.5 + sign * np.sqrt(n + 1.0) * g
    return float(energy) if energy.ndim == 0 else energy


def rwa_level(k, n, g):
    return RwaLevel(k=k, n=n, energy=rwa_energy(k, n, g))


def rwa_state(k, n):
    """Coefficients on |up, n> and |down, n+1>."""
    sign = check_branch(k)
    if n < 0:
        raise ConfigError(f"Photon index must be non-negative, got {n}")
    return sign * SQRT_HALF, SQRT_HALF


def rabi_frequencies(n, g):
    return 2.0 * g * np.sqrt(np.asarray(n, dtype=float) + 1.0)


def rwa_inversion(field, g, grid):
    values = oscillation_sum(field.weights, rabi_frequencies(field.photon_numbers, g), grid.times)
    return make_series(grid, values, 'W_rwa')


def rwa_gaussian_envelope(field, g, grid):
    """cos(2gt sqrt(alpha^2+1)) exp(-(gt)^2/2); meaningful while gt < alpha."""
    gt = g * grid.times
    if gt[-1] > max(field.alpha, 1.0):
        logger.debug(f"Gaussian envelope evaluated past gt = alpha ({gt[-1]:.2f} > {field.alpha:.2f})")
    values = np.cos(2.0 * gt * math.sqrt(field.mean_photons + 1.0)) * np.exp(-gt ** 2 / 2.0)
    return make_series(grid, values, 'W_rwa_gaussian')
