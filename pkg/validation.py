# validation.py
import math
import time
from dataclasses import dataclass, field

import numpy as np

from crwa import crwa_energy_closed, cubic_residual, ground_state
from dynamics import (collapse_metrics, crwa_inversion_full, diff_k_envelope_sum, envelope_same_k_approx,
                      revival_time, saddle_point_envelope, sliding_window_amplitude)
from exact import exact_eigensystem, exact_inversion, exact_n_cut, match_level, parity_labels
from models import coherent_field, reduced_time_grid
from rwa import rwa_inversion
from spectrum import (default_frequency_grid, detect_peaks, match_predictions, power_spectrum,
                      predict_peaks_first_order, predict_peaks_second_order)
from utils import setup_logger

logger = setup_logger(__name__)

ALPHA_SQ = 10.0
SPECTRUM_BIN = 0.1
SPECTRUM_FREQ_MAX = 25.0
# The weakest second-order peak stands about 2e-4 of the maximum power above its base at g = 0.2
SPECTRUM_PROMINENCE = 1e-4
CHECKS = {}


@dataclass(frozen=True)
class CheckSpec:
    name: str
    func: object
    quick: bool
    description: str


@dataclass
class CheckResult:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    elapsed: float = 0.0
    error: str = None

    def as_dict(self):
        return {
            'name': self.name,
            'passed': self.passed,
            'details': self.details,
            'elapsed_s': round(self.elapsed, 3),
            'error': self.error,
        }


def check(name, quick=True):
    """Register an acceptance check; quick checks also run under `validate --quick`."""
    def decorator(func):
        CHECKS[name] = CheckSpec(name=name, func=func, quick=quick, description=(func.__doc__ or '').strip())
        return func
    return decorator


def _field():
    return coherent_field(math.sqrt(ALPHA_SQ))


@check('cubic_roots')
def cubic_root_fidelity():
    """Both closed-form roots satisfy the cubic for n <= 60 and g up to 0.3."""
    worst = 0.0
    n = np.arange(61)
    for g in (0.02, 0.06, 0.1, 0.15, 0.2, 0.3):
        for k in (1, 2):
            energies = crwa_energy_closed(k, n, g)
            scaled = cubic_residual(n, g, energies) / np.maximum(1.0, np.abs(energies) ** 3)
            worst = max(worst, float(scaled.max()))
    return worst <= 1e-10, {'worst_scaled_residual': worst}


@check('energy_accuracy')
def energy_accuracy_order():
    """CRWA energies against exact levels: O(g^4) for n = 0, -n g^2 / 4 leading error for n >= 1."""
    errors = {}
    for g in (0.2, 0.1, 0.05):
        eigensystem = exact_eigensystem(g, 40)
        errors[g] = {(k, n): crwa_energy_closed(k, n, g) - match_level(eigensystem, k, n)
                     for n in range(6) for k in (1, 2)}

    ground_factors = [abs(errors[0.1][(k, 0)] / errors[0.05][(k, 0)]) for k in (1, 2)]
    shift_coefficients = [errors[0.05][(k, n)] / 0.05 ** 2 + n / 4.0 for n in range(1, 6) for k in (1, 2)]
    passed = min(ground_factors) >= 6.0 and max(abs(c) for c in shift_coefficients) < 0.1
    return passed, {'n0_halving_factors': ground_factors, 'max_shift_residual': max(abs(c) for c in shift_coefficients)}


@check('ground_state')
def ground_state_energy():
    """Second-order ground energy: -0.5202 at g = 0.2 and O(g^6) distance to the exact ground level."""
    value = ground_state(0.2, order=2).energy_2
    gaps = {g: abs(ground_state(g, order=2).energy_2 - exact_eigensystem(g, 30).ground_energy)
            for g in (0.1, 0.05)}
    factor = gaps[0.1] / gaps[0.05]
    passed = abs(value + 0.5202) < 1e-12 and 40.0 <= factor <= 90.0
    return passed, {'energy_2_at_0.2': value, 'halving_factor': factor}


@check('rwa_collapse')
def rwa_collapse_revival():
    """RWA plateau below 0.02 over tau in [8, 12]; revival above 0.3 near tau = 4 pi alpha."""
    field = _field()
    g = 0.02
    tau_r = revival_time(field.alpha)
    grid = reduced_time_grid(1.2 * tau_r, 6001, g)
    series = rwa_inversion(field, g, grid)
    plateau = series.max_abs(8.0, 12.0)
    revival = series.max_abs(0.85 * tau_r, 1.15 * tau_r)
    return plateau < 0.02 and revival > 0.3, {'plateau': plateau, 'revival': revival, 'revival_tau': tau_r}


@check('absence_of_collapse')
def absence_of_collapse():
    """Exact and CRWA plateaus stay within a factor 2 of g alpha while the RWA one is flat."""
    field = _field()
    details, passed = {}, True
    for g in (0.02, 0.06):
        grid = reduced_time_grid(1.2 * revival_time(field.alpha), 6001, g)
        eigensystem = exact_eigensystem(g, exact_n_cut(field))
        series = {
            'rwa': rwa_inversion(field, g, grid),
            'crwa': crwa_inversion_full(field, g, grid).total,
            'exact': exact_inversion(eigensystem, field, grid),
        }
        ratios = {name: collapse_metrics(s, g, field.alpha).intrinsic_ratio for name, s in series.items()}
        rwa_plateau = series['rwa'].max_abs(8.0, 12.0)
        passed &= rwa_plateau < 0.02 and all(0.5 <= ratios[b] <= 2.0 for b in ('crwa', 'exact'))
        details[f'g={g}'] = {'intrinsic_ratios': ratios, 'rwa_plateau': rwa_plateau}
    return passed, details


@check('fidelity_ordering', quick=False)
def fidelity_ordering():
    """CRWA stays closer to the exact inversion than the RWA over tau in [0, 40]."""
    field = _field()
    details, passed = {}, True
    for g in (0.02, 0.06, 0.1, 0.2):
        grid = reduced_time_grid(40.0, 4001, g)
        exact = exact_inversion(exact_eigensystem(g, exact_n_cut(field)), field, grid)
        to_crwa = exact.sup_distance(crwa_inversion_full(field, g, grid).total)
        to_rwa = exact.sup_distance(rwa_inversion(field, g, grid))
        passed &= to_crwa < to_rwa
        details[f'g={g}'] = {'crwa': to_crwa, 'rwa': to_rwa}
    return passed, details


@check('decomposition')
def decomposition_and_no_collapse():
    """Components sum to the total; the same-k part never drops below 0.3 g alpha inside the collapse."""
    field = _field()
    details, passed = {}, True
    for g in (0.02, 0.06, 0.1):
        collapse_end = 2.0 * math.pi * field.alpha
        grid = reduced_time_grid(collapse_end, 4001, g)
        parts = crwa_inversion_full(field, g, grid)
        rebuilt = parts.constant + parts.gs_term.values + parts.rabi.values + parts.same_k.values + parts.diff_k.values
        identity = float(np.max(np.abs(rebuilt - parts.total.values)))
        starts, amplitudes = sliding_window_amplitude(parts.same_k, width=2.0)
        inside = (starts >= 2.0) & (starts <= collapse_end - 2.0)
        weakest = float(amplitudes[inside].min())
        passed &= identity <= 1e-12 and weakest >= 0.3 * g * field.alpha
        details[f'g={g}'] = {'identity_error': identity, 'weakest_window': weakest, 'floor': 0.3 * g * field.alpha}
    return passed, details


@check('envelopes')
def envelope_approximants():
    """Same-k approximant half-period near 20; saddle point tracks the direct sum's peak and collapse."""
    field = _field()
    g = 0.06
    grid = reduced_time_grid(40.0, 4001, g)
    approx = envelope_same_k_approx(field, g, grid)
    starts, amplitudes = sliding_window_amplitude(approx, width=2.0)
    middle = (starts >= 10.0) & (starts <= 30.0)
    half_period = float(starts[middle][np.argmin(amplitudes[middle])] + 1.0)

    short = reduced_time_grid(10.0, 2001, g)
    direct = diff_k_envelope_sum(field, g, short)
    saddle = saddle_point_envelope(field.mean_photons, g, short)
    peak_direct, peak_saddle = float(np.abs(direct.values).max()), float(np.abs(saddle.values).max())
    peak_error = abs(peak_saddle - peak_direct) / peak_direct
    collapsed = direct.max_abs(8.0, 10.0) < 0.05 * peak_direct and saddle.max_abs(8.0, 10.0) < 0.05 * peak_saddle

    passed = 18.0 <= half_period <= 22.9 and peak_error < 0.1 and collapsed
    return passed, {'half_period_tau': half_period, 'peak_relative_error': peak_error, 'collapsed': collapsed}


@check('exact_contracts')
def exact_solver_contracts():
    """Orthonormality and residual at dimension 242, parity labels, truncation stability."""
    field = _field()
    g = 0.2
    small = exact_eigensystem(g, 60)
    large = exact_eigensystem(g, 120)
    labels = parity_labels(large)
    level_drift = float(np.max(np.abs(small.energies[:40] - large.energies[:40])))

    grid = reduced_time_grid(40.0, 801, g)
    w_small = exact_inversion(small, field, grid)
    w_large = exact_inversion(large, field, grid)
    doubling = w_small.sup_distance(w_large)

    passed = (large.orthogonality_error <= 1e-10
              and large.residual_norm <= 1e-10 * float(np.max(np.abs(large.energies)))
              and np.all(np.abs(labels) == 1)
              and level_drift <= 1e-10
              and doubling <= 1e-8)
    return passed, {
        'orthogonality': large.orthogonality_error,
        'residual': large.residual_norm,
        'level_drift': level_drift,
        'doubling_sup': doubling,
    }


def _exact_spectrum_peaks(field, g, bin_width=SPECTRUM_BIN, prominence=SPECTRUM_PROMINENCE):
    tau_max = 2.0 * math.pi / bin_width
    grid = reduced_time_grid(tau_max, int(round(tau_max / 0.01)) + 1, g)
    series = exact_inversion(exact_eigensystem(g, exact_n_cut(field)), field, grid)
    spectrum = power_spectrum(series, default_frequency_grid(tau_max, SPECTRUM_FREQ_MAX))
    return detect_peaks(spectrum, prominence), spectrum.bin_width


@check('spectrum_peaks', quick=False)
def spectrum_peak_matching():
    """First-order peaks at g = 0.06, 0.15, 0.2 and second-order peaks at g = 0.15, 0.2 in the exact spectrum."""
    field = _field()
    details, passed = {}, True
    for g in (0.06, 0.15, 0.2):
        predictions = predict_peaks_first_order(g, field.alpha)
        if g >= 0.15:
            predictions += predict_peaks_second_order(g, field.alpha)
        peaks, bin_width = _exact_spectrum_peaks(field, g)
        rows = match_predictions(peaks, predictions, bin_width)
        passed &= all(row['matched'] for row in rows)
        details[f'g={g}'] = rows
    return passed, details


def run_checks(quick=False, names=None):
    """Run registered checks in registration order and collect their results."""
    results = []
    for name, spec in CHECKS.items():
        if names and name not in names:
            continue
        if quick and not spec.quick:
            logger.debug(f"Skipping {name} under --quick")
            continue
        started = time.perf_counter()
        try:
            passed, details = spec.func()
            result = CheckResult(name=name, passed=bool(passed), details=details)
        except Exception as e:
            logger.error(f"Check {name} raised {type(e).__name__}: {e}")
            result = CheckResult(name=name, passed=False, error=f"{type(e).__name__}: {e}")
        result.elapsed = time.perf_counter() - started
        logger.info(f"Check {name}: {'PASS' if result.passed else 'FAIL'} ({result.elapsed:.2f}s)")
        results.append(result)
    return results
