# models.py
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from app_config import Config
from errors import ConfigError
from utils import setup_logger

logger = setup_logger(__name__)


def _read_only(values, dtype=float):
    array = np.array(values, dtype=dtype)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class ModelParams:
    """Coupling and frequencies of the Rabi Hamiltonian, in units of the cavity frequency."""

    g: float
    delta_atom: float = 1.0
    omega: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.g) or self.g < 0:
            raise ConfigError(f"Coupling g must be a non-negative number, got {self.g}")
        if self.omega != 1.0:
            raise ConfigError(f"The cavity frequency sets the energy unit and must be 1, got {self.omega}")

    @property
    def detuning(self):
        return self.delta_atom - self.omega

    @property
    def is_resonant(self):
        return self.detuning == 0.0


@dataclass(frozen=True, eq=False)
class CoherentField:
    """
    Truncated coherent state of the cavity with real amplitude alpha.

    betas[n] is the probability amplitude of the Fock state |n>, n = 0..n_cut.
    """

    alpha: float
    betas: np.ndarray
    tail_deficit: float
    tail_tol: float = None

    @property
    def n_cut(self):
        return len(self.betas) - 1

    @property
    def mean_photons(self):
        return self.alpha ** 2

    @property
    def weights(self):
        return self.betas ** 2

    @property
    def photon_numbers(self):
        return np.arange(len(self.betas))


@dataclass(frozen=True, eq=False)
class TimeGrid:
    """Uniform reduced-time grid; tau = 2 g_ref t."""

    tau_values: np.ndarray
    g_ref: float

    def __post_init__(self):
        tau = self.tau_values
        if tau.ndim != 1 or len(tau) < 2:
            raise ConfigError("A time grid needs at least two samples")
        steps = np.diff(tau)
        if np.any(steps <= 0):
            raise ConfigError("Time grid must be strictly increasing")
        if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
            raise ConfigError("Time grid must be uniform")
        if not self.g_ref > 0:
            raise ConfigError(f"Time grid needs g > 0 for the tau <-> t conversion, got {self.g_ref}")

    @property
    def times(self):
        return self.tau_values / (2.0 * self.g_ref)

    @property
    def tau_step(self):
        return float(self.tau_values[1] - self.tau_values[0])

    @property
    def time_step(self):
        return self.tau_step / (2.0 * self.g_ref)

    @property
    def tau_max(self):
        return float(self.tau_values[-1])

    def __len__(self):
        return len(self.tau_values)


@dataclass(frozen=True, eq=False)
class TimeSeries:
    grid: TimeGrid
    values: np.ndarray
    label: str = ''

    def __post_init__(self):
        if self.values.shape != self.grid.tau_values.shape:
            raise ConfigError(
                f"Series '{self.label}' has {self.values.shape} samples for a grid of {len(self.grid)}"
            )

    @property
    def tau(self):
        return self.grid.tau_values

    @property
    def times(self):
        return self.grid.times

    def sup_distance(self, other, tau_max=None):
        """Largest pointwise difference, optionally restricted to tau <= tau_max."""
        if len(other.values) != len(self.values) or not np.allclose(other.tau, self.tau):
            raise ConfigError("Series must share a time grid to be compared")
        diff = np.abs(self.values - other.values)
        if tau_max is not None:
            diff = diff[self.tau <= tau_max]
        return float(diff.max())

    def window(self, tau_lo, tau_hi):
        mask = (self.tau >= tau_lo) & (self.tau <= tau_hi)
        return self.tau[mask], self.values[mask]

    def max_abs(self, tau_lo, tau_hi):
        _, values = self.window(tau_lo, tau_hi)
        if len(values) == 0:
            raise ConfigError(f"Window [{tau_lo}, {tau_hi}] holds no samples of '{self.label}'")
        return float(np.abs(values).max())

    def __add__(self, other):
        return TimeSeries(self.grid, _read_only(self.values + other.values), self.label)


def make_series(grid, values, label):
    return TimeSeries(grid, _read_only(values), label)


def _validate_alpha(alpha):
    if isinstance(alpha, complex) or np.iscomplexobj(alpha):
        raise ConfigError(f"Coherent amplitude must be real, got {alpha}")
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha < 0:
        raise ConfigError(f"Coherent amplitude must be non-negative, got {alpha}")
    return alpha


def coherent_amplitudes(alpha, n_cut, tail_tol=None):
    """
    Poisson amplitudes of a coherent state up to photon number n_cut.

    The recurrence beta_{n+1} = beta_n * alpha / sqrt(n+1) starting at exp(-alpha^2/2)
    never forms n! explicitly.
    """
    alpha = _validate_alpha(alpha)
    if int(n_cut) != n_cut or n_cut < 0:
        raise ConfigError(f"Truncation index must be a non-negative integer, got {n_cut}")
    n_cut = int(n_cut)

    ratios = alpha / np.sqrt(np.arange(1, n_cut + 1, dtype=float))
    betas = math.exp(-alpha ** 2 / 2.0) * np.concatenate(([1.0], np.cumprod(ratios)))
    tail_deficit = max(0.0, 1.0 - math.fsum(betas ** 2))

    return CoherentField(alpha=alpha, betas=_read_only(betas), tail_deficit=tail_deficit, tail_tol=tail_tol)


def coherent_amplitudes_logspace(alpha, n_cut):
    """Same amplitudes evaluated as exp(-alpha^2/2 + n ln alpha - ln(n!)/2); used as a cross-check."""
    alpha = _validate_alpha(alpha)
    n = np.arange(n_cut + 1, dtype=float)
    if alpha == 0.0:
        return (n == 0).astype(float)
    return np.exp(-alpha ** 2 / 2.0 + n * math.log(alpha) - 0.5 * gammaln(n + 1.0))


def choose_truncation(alpha, tail_tol):
    """
    Smallest N with sum_{n>N} beta_n^2 < tail_tol.

    Parameters:
    - alpha: real coherent amplitude
    - tail_tol: tolerated probability outside the truncated basis

    Returns:
    - N, verified by explicit tail summation
    """
    alpha = _validate_alpha(alpha)
    if not tail_tol > 0:
        raise ConfigError(f"Tail tolerance must be positive, got {tail_tol}")
    if alpha == 0.0:
        return 0

    mean = alpha ** 2
    n_max = math.ceil(mean + 12.0 * math.sqrt(mean + 1.0) + 10.0)
    while True:
        weights = coherent_amplitudes(alpha, n_max).weights
        # beta_{n+1}^2 / beta_n^2 = mean / (n+1) bounds the remainder geometrically
        ratio = mean / (n_max + 1.0)
        remainder = weights[-1] * ratio / (1.0 - ratio) if ratio < 0.5 else np.inf
        if remainder < tail_tol * 1e-3:
            break
        n_max *= 2
        logger.debug(f"Extending truncation search to {n_max} for alpha={alpha}")

    # tails[N] = sum over n > N
    reversed_sums = np.cumsum(weights[::-1])[::-1]
    tails = np.append(reversed_sums[1:], 0.0) + remainder
    n_cut = int(np.argmax(tails < tail_tol))
    logger.debug(f"Truncation for alpha={alpha}, tol={tail_tol}: n_cut={n_cut}")
    return n_cut


def coherent_field(alpha, tail_tol=None, n_cut=None):
    """
    Coherent field truncated by tolerance (default Config.TAIL_TOL) or by an explicit n_cut.
    """
    tail_tol = Config.TAIL_TOL if tail_tol is None else tail_tol
    explicit = n_cut is not None
    if not explicit:
        n_cut = choose_truncation(alpha, tail_tol)
    field = coherent_amplitudes(alpha, n_cut, tail_tol=tail_tol)

    # Rounding in 1 - sum can leave the recorded deficit just above the tolerance;
    # an explicit n_cut is kept as given
    while not explicit and field.tail_deficit > tail_tol and n_cut < 10 * (field.mean_photons + 50):
        n_cut += 1
        field = coherent_amplitudes(alpha, n_cut, tail_tol=tail_tol)
    if field.tail_deficit > tail_tol:
        logger.warning(
            f"Coherent field alpha={alpha} truncated at {field.n_cut} leaves "
            f"{field.tail_deficit:.3e} outside the basis (tolerance {tail_tol:.1e})"
        )
    return field


def reduced_time_grid(tau_max, n_points, g):
    if not g > 0:
        raise ConfigError(f"Reduced time tau = 2gt is degenerate for g = {g}")
    if not tau_max > 0:
        raise ConfigError(f"tau_max must be positive, got {tau_max}")
    if int(n_points) != n_points or n_points < 2:
        raise ConfigError(f"n_points must be an integer >= 2, got {n_points}")
    tau = np.linspace(0.0, float(tau_max), int(n_points))
    return TimeGrid(tau_values=_read_only(tau), g_ref=float(g))


def oscillation_sum(amplitudes, frequencies, times, kind='cos', chunk_size=None):
    """
    sum_j amplitudes[j] * cos(frequencies[j] * t) (or sin) for every t.

    Evaluated in chunks of time points with a fixed summation order.
    """
    amplitudes = np.asarray(amplitudes, dtype=float)
    frequencies = np.asarray(frequencies, dtype=float)
    times = np.asarray(times, dtype=float)
    chunk_size = chunk_size or Config.CHUNK_SIZE
    trig = np.cos if kind == 'cos' else np.sin

    result = np.empty(len(times))
    for start in range(0, len(times), chunk_size):
        block = times[start:start + chunk_size]
        result[start:start + chunk_size] = trig(np.outer(block, frequencies)) @ amplitudes
    return result
