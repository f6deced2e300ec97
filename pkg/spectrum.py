# spectrum.py
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid
from scipy.signal import find_peaks, peak_widths

from app_config import Config
from crwa import crwa_energy_closed
from errors import ConfigError, SpectrumError
from models import make_series, oscillation_sum
from utils import setup_logger

logger = setup_logger(__name__)

FIRST_ORDER_LABELS = ('rabi', 'omega_s_k1', 'omega_s_k2', 'omega_d_k1', 'omega_d_k2')
SECOND_ORDER_LABELS = ('Omega_s_k1', 'Omega_s_k2', 'Omega_d_k1', 'Omega_d_k2')


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    """
    |F(omega)|^2 on a grid in units of 2g.

    duration is the integration time T in absolute units; bin_width = 2 pi / T in units of 2g.
    """

    freqs: np.ndarray
    power: np.ndarray
    duration: float
    bin_width: float
    g_ref: float
    label: str = ''

    @property
    def absolute_freqs(self):
        return self.freqs * 2.0 * self.g_ref


@dataclass(frozen=True)
class PeakPrediction:
    label: str
    frequency: float
    order: int
    observable: bool = True

    def as_dict(self):
        return {'label': self.label, 'frequency': self.frequency, 'order': self.order, 'observable': self.observable}


@dataclass(frozen=True)
class DetectedPeak:
    """Apex of a local maximum; left and right bound it at half prominence."""

    frequency: float
    height: float
    half_width: float
    prominence: float
    left: float
    right: float

    def distance_to(self, frequency):
        """Zero inside [left, right], otherwise the gap to the nearer edge."""
        if frequency < self.left:
            return self.left - frequency
        if frequency > self.right:
            return frequency - self.right
        return 0.0

    def as_dict(self):
        return {
            'frequency': self.frequency,
            'height': self.height,
            'half_width': self.half_width,
            'prominence': self.prominence,
            'left': self.left,
            'right': self.right,
        }


def bin_width_for(tau_max):
    """Resolution 2 pi / T in units of 2g; T = tau_max / (2g) makes it g-independent."""
    return 2.0 * math.pi / tau_max


def default_frequency_grid(duration_tau, freq_max=None):
    freq_max = Config.SPECTRUM_FREQ_MAX if freq_max is None else freq_max
    step = bin_width_for(duration_tau)
    count = int(math.floor(freq_max / step + 1e-9)) + 1
    return np.arange(count) * step


def power_spectrum(series, freq_grid, chunk_size=64):
    """
    F(omega) = |integral_0^T W(t) exp(-i omega t) dt|^2 by the trapezoidal rule.

    The semi-infinite integral is cut at the end of the series with a rectangular window.
    """
    # chunk_size counts frequencies; each chunk builds a (chunk, n_times) kernel
    freqs = np.asarray(freq_grid, dtype=float)
    grid = series.grid
    g = grid.g_ref
    times = grid.times
    duration = float(times[-1] - times[0])
    bin_width = 2.0 * math.pi / duration / (2.0 * g)

    if len(freqs) == 0:
        raise ConfigError("Frequency grid is empty")
    if np.any(np.diff(freqs) <= 0):
        raise ConfigError("Frequency grid must be strictly increasing")
    if len(freqs) > 1 and np.min(np.diff(freqs)) < bin_width * (1.0 - 1e-9):
        raise ConfigError(
            f"Frequency spacing {np.min(np.diff(freqs)):.4g} is finer than the resolution "
            f"2pi/T = {bin_width:.4g} (units of 2g); lengthen the series"
        )
    nyquist = math.pi / grid.time_step
    if 2.0 * g * np.max(np.abs(freqs)) >= nyquist:
        raise ConfigError(
            f"Highest frequency {np.max(freqs):.4g} (units of 2g) reaches the sampling Nyquist limit "
            f"{nyquist / (2.0 * g):.4g}; use more points"
        )
    if not np.all(np.isfinite(series.values)):
        raise SpectrumError(f"Series '{series.label}' holds non-finite values")

    omegas = 2.0 * g * freqs
    amplitude = np.empty(len(freqs), dtype=complex)
    for start in range(0, len(freqs), chunk_size):
        block = omegas[start:start + chunk_size]
        kernel = np.exp(-1j * np.outer(block, times))
        amplitude[start:start + chunk_size] = trapezoid(kernel * series.values, times, axis=1)

    power = np.abs(amplitude) ** 2
    logger.debug(f"Power spectrum of '{series.label}': T={duration:.1f}, bin={bin_width:.4f}, {len(freqs)} frequencies")
    return SpectrumResult(
        freqs=freqs,
        power=power,
        duration=duration,
        bin_width=bin_width,
        g_ref=g,
        label=series.label,
    )


def _check_prediction_inputs(g, alpha):
    if not g > 0:
        raise ConfigError(f"Peak predictions are in units of 2g and need g > 0, got {g}")
    if alpha < 0:
        raise ConfigError(f"Coherent amplitude must be non-negative, got {alpha}")


def predict_peaks_first_order(g, alpha):
    """
    Dominant frequencies from levels near n = alpha^2, in units of 2g.

    omega_k^s = [2 - g^2/2 + (-1)^k g (sqrt(a^2+3) - sqrt(a^2+1))] / 2g
    omega_k^d = [2 - g^2/2 + (-1)^k g (sqrt(a^2+3) + sqrt(a^2+1))] / 2g
    omega_c = (1 - g^2/4) / g lies between the omega^s pair and is not itself a peak.
    """
    _check_prediction_inputs(g, alpha)
    a2 = alpha ** 2
    close = math.sqrt(a2 + 3.0) - math.sqrt(a2 + 1.0)
    apart = math.sqrt(a2 + 3.0) + math.sqrt(a2 + 1.0)
    carrier = 2.0 - g ** 2 / 2.0

    predictions = [PeakPrediction('rabi', math.sqrt(a2 + 1.0), 1)]
    for k, sign in ((1, -1.0), (2, 1.0)):
        predictions.append(PeakPrediction(f'omega_s_k{k}', (carrier + sign * g * close) / (2.0 * g), 1))
    for k, sign in ((1, -1.0), (2, 1.0)):
        predictions.append(PeakPrediction(f'omega_d_k{k}', (carrier + sign * g * apart) / (2.0 * g), 1))
    predictions.append(PeakPrediction('omega_c', (1.0 - g ** 2 / 4.0) / g, 1, observable=False))
    return predictions


def predict_peaks_second_order(g, alpha):
    """
    Frequencies of the (k, n) -> (k', n+4) transitions near n = alpha^2, in units of 2g.

    They follow from CRWA energies, which are still used here since no closed form
    exists for the second-order excited states.
    """
    _check_prediction_inputs(g, alpha)
    a2 = alpha ** 2
    close = math.sqrt(a2 + 5.0) - math.sqrt(a2 + 1.0)
    apart = math.sqrt(a2 + 5.0) + math.sqrt(a2 + 1.0)
    carrier = 4.0 - g ** 2

    predictions = []
    for k, sign in ((1, -1.0), (2, 1.0)):
        predictions.append(PeakPrediction(f'Omega_s_k{k}', (carrier + sign * g * close) / (2.0 * g), 2))
    for k, sign in ((1, -1.0), (2, 1.0)):
        predictions.append(PeakPrediction(f'Omega_d_k{k}', (carrier + sign * g * apart) / (2.0 * g), 2))
    return predictions


def higher_order_components(field, g, grid, order=2):
    """
    Intrinsic oscillations of the m-th correction (m = order):
    g^m alpha^2 sum_{k,k'} sum_n beta_n^2 / sqrt(n + 2m - 1) cos((E_{k,n+2m} - E_{k',n}) t).
    """
    if order not in (2, 3):
        raise ConfigError(f"Higher-order component must be of order 2 or 3, got {order}")
    step = 2 * order
    n = field.photon_numbers
    e_top = [crwa_energy_closed(k, n + step, g) for k in (1, 2)]
    e_low = [crwa_energy_closed(k, n, g) for k in (1, 2)]
    amplitude = g ** order * field.mean_photons * field.weights / np.sqrt(n + step - 1.0)

    frequencies = np.concatenate([e_top[k] - e_low[kp] for k in range(2) for kp in range(2)])
    amplitudes = np.tile(amplitude, 4)
    values = oscillation_sum(amplitudes, frequencies, grid.times)
    return make_series(grid, values, f'W_order{order}')


def detect_peaks(spectrum, min_prominence=None):
    """
    Local maxima whose prominence is at least min_prominence * max(power).

    Flat tops resolve to their lowest-frequency sample. Half-widths are taken at half
    prominence and reported in units of 2g.
    """
    min_prominence = Config.PEAK_PROMINENCE if min_prominence is None else min_prominence
    power = spectrum.power
    peak_power = float(np.max(power)) if len(power) else 0.0
    if peak_power <= 0.0:
        return []

    indices, properties = find_peaks(power, prominence=min_prominence * peak_power, plateau_size=1)
    if len(indices) == 0:
        return []
    widths, _, left_ips, right_ips = peak_widths(power, indices, rel_height=0.5, prominence_data=(
        properties['prominences'], properties['left_bases'], properties['right_bases']))
    freqs = spectrum.freqs
    step = float(np.mean(np.diff(freqs))) if len(freqs) > 1 else 0.0

    peaks = []
    for index, left_edge, width, prominence, left, right in zip(
            indices, properties['left_edges'], widths, properties['prominences'], left_ips, right_ips):
        peaks.append(DetectedPeak(
            frequency=float(freqs[left_edge]),
            height=float(power[index]),
            half_width=float(width * step / 2.0),
            prominence=float(prominence),
            left=float(freqs[0] + left * step),
            right=float(freqs[0] + right * step),
        ))
    return sorted(peaks, key=lambda peak: peak.frequency)


def match_predictions(peaks, predictions, bin_width, tolerance_bins=2.0):
    """
    Pair each observable prediction with the nearest detected peak.

    Distance is measured to the peak's half-prominence extent, so a prediction inside a broad
    or blended peak counts as on it; offset_bins still reports the apex offset.
    """
    rows = []
    for prediction in predictions:
        if not prediction.observable:
            continue
        target = prediction.frequency
        if peaks:
            nearest = min(peaks, key=lambda peak: (peak.distance_to(target), abs(peak.frequency - target),
                                                   peak.frequency))
            offset = (nearest.frequency - target) / bin_width
            gap = nearest.distance_to(target) / bin_width
            detected = nearest.frequency
        else:
            offset = gap = float('inf')
            detected = None
        rows.append({
            'label': prediction.label,
            'order': prediction.order,
            'predicted': target,
            'detected': detected,
            'offset_bins': offset,
            'extent_bins': gap,
            'matched': gap <= tolerance_bins,
        })
    return rows


def component_spectra(parts, freq_grid):
    """Spectra of each named series, e.g. the Rabi and intrinsic parts of the concise inversion."""
    return {name: power_spectrum(series, freq_grid) for name, series in parts.items()}


def peak_near(peaks, frequency, bin_width, tolerance_bins=2.0):
    candidates = [peak for peak in peaks if abs(peak.frequency - frequency) <= tolerance_bins * bin_width]
    if not candidates:
        return None
    return max(candidates, key=lambda peak: peak.height)
