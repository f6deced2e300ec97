# dynamics.py
import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.optimize import newton

from crwa import crwa_energy_closed, ground_state
from errors import ConfigError, NumericalError
from models import make_series, oscillation_sum
from utils import setup_logger

logger = setup_logger(__name__)


@dataclass(frozen=True, eq=False)
class InversionCoefficients:
    """
    Amplitudes of every oscillation in the upper-level probability P(t).

    f and h have shape (2, n_cut + 1); row k-1 holds branch k.
    """

    f: np.ndarray
    h: np.ndarray
    R: np.ndarray
    I1: np.ndarray
    I2: np.ndarray
    I12: np.ndarray
    I21: np.ndarray
    C: float
    S: np.ndarray


@dataclass(frozen=True, eq=False)
class InversionComponents:
    constant: float
    gs_term: object
    rabi: object
    same_k: object
    diff_k: object
    total: object

    def as_dict(self):
        return {
            'gs_term': self.gs_term,
            'rabi': self.rabi,
            'same_k': self.same_k,
            'diff_k': self.diff_k,
            'total': self.total,
        }


@dataclass(frozen=True)
class CollapseMetrics:
    plateau_amplitude: float
    revival_amplitude: float
    intrinsic_ratio: float

    def as_dict(self):
        return {
            'plateau_amplitude': self.plateau_amplitude,
            'revival_amplitude': self.revival_amplitude,
            'intrinsic_ratio': self.intrinsic_ratio,
        }


@dataclass(frozen=True, eq=False)
class SaddlePointDiagnostic:
    times: np.ndarray
    n0_closed: np.ndarray
    n0_refined: np.ndarray


def _check_coupling(g):
    if g < 0:
        raise ConfigError(f"Coupling must be non-negative, got {g}")


def carrier_frequency(g):
    """Shared fast frequency 2 - g^2/2 of the intrinsic oscillations."""
    return 2.0 - g ** 2 / 2.0


def compute_coefficients(field, g):
    _check_coupling(g)
    beta = field.betas
    weights = field.weights
    a2 = field.mean_photons
    n = field.photon_numbers.astype(float)
    root1, root2, root3 = np.sqrt(n + 1.0), np.sqrt(n + 2.0), np.sqrt(n + 3.0)
    shift = n - 2.0 * a2 + 2.0

    f = np.empty((2, len(n)))
    h = np.empty((2, len(n)))
    for row, sign in enumerate((-1.0, 1.0)):
        f[row] = beta * (0.5 + sign * shift * g / (8.0 * root1) - a2 * g ** 2 / 8.0)
        h[row] = beta * (-sign * root2 * g / 4.0 + np.sqrt((n + 2.0) / (n + 1.0)) * (a2 - n - 1.0) * g ** 2 / 8.0)

    R = 0.5 * weights * (1.0 - (a2 / 2.0 + shift ** 2 / (16.0 * (n + 1.0)) + n / 4.0 + 0.5) * g ** 2)

    mixed = (n + 4.0 - 2.0 * a2) / (8.0 * root1 * root3)
    detuned = (a2 - n - 1.0) / (4.0 * (n + 1.0))
    linear = 0.5 * a2 * g / root1
    I1 = 0.5 * weights * ((-mixed + detuned) * a2 * g ** 2 + linear)
    I2 = 0.5 * weights * ((-mixed + detuned) * a2 * g ** 2 - linear)
    I12 = 0.5 * weights * ((mixed + detuned) * a2 * g ** 2 + linear)
    I21 = 0.5 * weights * ((mixed + detuned) * a2 * g ** 2 - linear)

    C = 0.5 + g ** 2 * math.fsum(weights * (-a2 / 4.0 + shift ** 2 / (32.0 * (n + 1.0)) + n / 8.0 + 0.25))
    S = np.full(2, 0.25 * math.exp(-a2) * a2 * g ** 2)

    return InversionCoefficients(f=f, h=h, R=R, I1=I1, I2=I2, I12=I12, I21=I21, C=C, S=S)


def _closed_energies(g, n_top):
    n = np.arange(n_top + 1)
    return crwa_energy_closed(1, n, g), crwa_energy_closed(2, n, g)


def _ground_state_term(field, g, times):
    a2 = field.mean_photons
    return (a2 * g ** 2 * math.exp(-a2)
            * np.cos((2.0 - g ** 2 / 4.0) * times)
            * np.cos((1.0 - 15.0 * g ** 2 / 64.0) * math.sqrt(2.0) * g * times))


def crwa_inversion_full(field, g, grid):
    """
    W = (2C - 1) + W_GS + W_Rabi + W_same_k + W_diff_k with every amplitude from
    compute_coefficients and closed-form CRWA energies inside the cosines.
    """
    coefficients = compute_coefficients(field, g)
    n_cut = field.n_cut
    e1, e2 = _closed_energies(g, n_cut + 2)
    lo, hi = slice(0, n_cut + 1), slice(2, n_cut + 3)
    times = grid.times

    constant = 2.0 * coefficients.C - 1.0
    gs_values = _ground_state_term(field, g, times)
    rabi_values = oscillation_sum(2.0 * coefficients.R, e2[lo] - e1[lo], times)
    same_k_values = oscillation_sum(
        2.0 * np.concatenate((coefficients.I1, coefficients.I2)),
        np.concatenate((e1[lo] - e1[hi], e2[lo] - e2[hi])),
        times,
    )
    diff_k_values = oscillation_sum(
        2.0 * np.concatenate((coefficients.I12, coefficients.I21)),
        np.concatenate((e1[lo] - e2[hi], e2[lo] - e1[hi])),
        times,
    )
    total = constant + gs_values + rabi_values + same_k_values + diff_k_values

    return InversionComponents(
        constant=constant,
        gs_term=make_series(grid, gs_values, 'W_gs'),
        rabi=make_series(grid, rabi_values, 'W_rabi'),
        same_k=make_series(grid, same_k_values, 'W_same_k'),
        diff_k=make_series(grid, diff_k_values, 'W_diff_k'),
        total=make_series(grid, total, 'W_crwa'),
    )


def gs_term_from_levels(field, g, grid):
    """2 sum_k S_k cos((E_GS - E_k1) t) with the first-order ground energy."""
    coefficients = compute_coefficients(field, g)
    e_gs = ground_state(g, order=1).energy_1
    levels = np.array([crwa_energy_closed(1, 1, g), crwa_energy_closed(2, 1, g)])
    values = oscillation_sum(2.0 * coefficients.S, e_gs - levels, grid.times)
    return make_series(grid, values, 'W_gs_levels')


def _concise_terms(field, g):
    n = field.photon_numbers.astype(float)
    root1, root3 = np.sqrt(n + 1.0), np.sqrt(n + 3.0)
    carrier = carrier_frequency(g)
    intrinsic_amplitude = field.weights * g * field.mean_photons / (2.0 * root1)

    rabi = (field.weights, 2.0 * root1 * g)
    # Pairs (k, k') with sign -(-1)^{k'}: same-k (1,1) +, (2,2) -, different-k (2,1) +, (1,2) -
    frequencies = np.concatenate((
        carrier - g * (root3 - root1),
        carrier + g * (root3 - root1),
        carrier + g * (root3 + root1),
        carrier - g * (root3 + root1),
    ))
    amplitudes = np.concatenate((intrinsic_amplitude, -intrinsic_amplitude, intrinsic_amplitude, -intrinsic_amplitude))
    return rabi, (amplitudes, frequencies)


def crwa_inversion_concise(field, g, grid):
    """Amplitudes to order g, energy differences to order g^2."""
    return crwa_inversion_concise_parts(field, g, grid)['total']


def crwa_inversion_concise_parts(field, g, grid):
    _check_coupling(g)
    (rabi_amp, rabi_freq), (intr_amp, intr_freq) = _concise_terms(field, g)
    times = grid.times
    rabi = oscillation_sum(rabi_amp, rabi_freq, times)
    intrinsic = oscillation_sum(intr_amp, intr_freq, times)
    return {
        'rabi': make_series(grid, rabi, 'W_concise_rabi'),
        'intrinsic': make_series(grid, intrinsic, 'W_concise_intrinsic'),
        'total': make_series(grid, rabi + intrinsic, 'W_crwa_concise'),
    }


def _envelope_sum(field, g, times, combine):
    n = field.photon_numbers.astype(float)
    root1, root3 = np.sqrt(n + 1.0), np.sqrt(n + 3.0)
    return oscillation_sum(field.weights / root1, g * combine(root3, root1), times, kind='sin')


def envelope_same_k(field, g, grid):
    times = grid.times
    envelope = _envelope_sum(field, g, times, lambda r3, r1: r3 - r1)
    values = g * field.mean_photons * np.sin(carrier_frequency(g) * times) * envelope
    return make_series(grid, values, 'W_same_k_envelope')


def envelope_same_k_approx(field, g, grid):
    """Single n = alpha^2 term of the same-k sum."""
    times = grid.times
    scale = math.sqrt(field.mean_photons + 1.0)
    values = (g * field.mean_photons / scale
              * np.sin(carrier_frequency(g) * times)
              * np.sin(g * times / scale))
    return make_series(grid, values, 'W_same_k_approx')


def envelope_diff_k(field, g, grid):
    times = grid.times
    envelope = _envelope_sum(field, g, times, lambda r3, r1: r3 + r1)
    values = -g * field.mean_photons * np.sin(carrier_frequency(g) * times) * envelope
    return make_series(grid, values, 'W_diff_k_envelope')


def envelope_diff_k_approx(field, g, grid):
    """-g alpha sin((2 - g^2/2) t) sin(2 g alpha t) exp(-(gt)^2 / 2)."""
    if field.mean_photons == 0:
        return make_series(grid, np.zeros(len(grid)), 'W_diff_k_approx')
    envelope = saddle_point_envelope(field.mean_photons, g, grid)
    values = -g * field.mean_photons * np.sin(carrier_frequency(g) * grid.times) * envelope.values
    return make_series(grid, values, 'W_diff_k_approx')


def solve_saddle_point(n_bar, g, t):
    """
    Complex root n0 of ln(n0 / n_bar) = i (1/sqrt(n0+1) + 1/sqrt(n0+3)) g t / 2,
    started from n_bar (1 + i g t / sqrt(n_bar)).
    """
    gt = g * t
    start = n_bar * (1.0 + 1j * gt / math.sqrt(n_bar))

    def stationarity(n0):
        return np.log(n0 / n_bar) - 0.5j * gt * (1.0 / np.sqrt(n0 + 1.0) + 1.0 / np.sqrt(n0 + 3.0))

    def slope(n0):
        return 1.0 / n0 + 0.25j * gt * ((n0 + 1.0) ** -1.5 + (n0 + 3.0) ** -1.5)

    try:
        return complex(newton(stationarity, start, fprime=slope, tol=1e-12, maxiter=100))
    except RuntimeError as e:
        raise NumericalError(f"Saddle point did not converge at gt={gt}: {e}") from e


def saddle_point_envelope(n_bar, g, grid, diagnostic=False):
    """
    Saddle-point evaluation of F(t) = sum_n beta_n^2 / sqrt(n+1) sin(g (sqrt(n+1) + sqrt(n+3)) t).

    With S(n) = n/n_bar - (n/n_bar) ln(n/n_bar) + i (sqrt(n+1) + sqrt(n+3)) g t / n_bar and
    the short-time saddle point n0 ~ n_bar (1 + i g t / sqrt(n_bar)), the result is
    F(t) ~ sin(2 g sqrt(n_bar) t) exp(-(gt)^2 / 2) / sqrt(n_bar). Valid while g t << sqrt(n_bar).

    diagnostic=True also returns a SaddlePointDiagnostic with the closed-form and the
    Newton-refined n0 at every time.
    """
    if not n_bar > 0:
        raise ConfigError(f"Mean photon number must be positive for the saddle point, got {n_bar}")
    times = grid.times
    gt = g * times
    root = math.sqrt(n_bar)
    if gt[-1] > root:
        logger.warning(f"Saddle-point envelope used beyond gt = sqrt(n_bar) ({gt[-1]:.2f} > {root:.2f})")

    values = np.sin(2.0 * g * root * times) * np.exp(-gt ** 2 / 2.0) / root
    series = make_series(grid, values, 'F_saddle')
    if not diagnostic:
        return series

    closed = n_bar * (1.0 + 1j * gt / root)
    refined = np.array([solve_saddle_point(n_bar, g, t) for t in times])
    return series, SaddlePointDiagnostic(times=times, n0_closed=closed, n0_refined=refined)


def diff_k_envelope_sum(field, g, grid):
    """The bare sum F(t) the saddle point approximates."""
    return make_series(grid, _envelope_sum(field, g, grid.times, lambda r3, r1: r3 + r1), 'F_direct')


def sliding_window_amplitude(series, width=2.0):
    """
    (max - min) / 2 over every reduced-time window [tau, tau + width].

    Returns window start taus and amplitudes.
    """
    samples = int(round(width / series.grid.tau_step)) + 1
    if samples > len(series.values):
        raise ConfigError(f"Window width {width} is longer than the series ({series.grid.tau_max})")
    windows = sliding_window_view(series.values, samples)
    amplitudes = (windows.max(axis=1) - windows.min(axis=1)) / 2.0
    return series.tau[:len(amplitudes)], amplitudes


def revival_time(alpha):
    """First RWA revival in reduced time: tau = 4 pi alpha (gt = 2 pi alpha)."""
    return 4.0 * math.pi * alpha


def collapse_metrics(series, g, alpha):
    if not (g > 0 and alpha > 0):
        raise ConfigError(f"Collapse metrics need g > 0 and alpha > 0, got g={g}, alpha={alpha}")
    collapse_end = 2.0 * math.pi * alpha
    plateau = series.max_abs(0.4 * collapse_end, 0.6 * collapse_end)

    revival = revival_time(alpha)
    if series.grid.tau_max < 0.85 * revival:
        logger.warning(f"Series ends at tau={series.grid.tau_max:.1f}, before the revival near {revival:.1f}")
        revival_amplitude = float('nan')
    else:
        revival_amplitude = series.max_abs(0.85 * revival, 1.15 * revival)

    return CollapseMetrics(
        plateau_amplitude=plateau,
        revival_amplitude=revival_amplitude,
        intrinsic_ratio=plateau / (g * alpha),
    )
