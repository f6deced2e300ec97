# tests/test_dynamics.py
import math

import numpy as np
import pytest

from dynamics import (carrier_frequency, collapse_metrics, compute_coefficients, crwa_inversion_concise,
                      crwa_inversion_concise_parts, crwa_inversion_full, diff_k_envelope_sum, envelope_diff_k,
                      envelope_diff_k_approx, envelope_same_k, envelope_same_k_approx, gs_term_from_levels,
                      saddle_point_envelope, sliding_window_amplitude, solve_saddle_point)
from errors import ConfigError
from exact import exact_inversion, exact_n_cut
from models import coherent_field, reduced_time_grid
from rwa import rwa_inversion


def test_amplitude_identities(field):
    g = 0.06
    coefficients = compute_coefficients(field, g)
    a2 = field.mean_photons
    n = field.photon_numbers.astype(float)
    weights = field.weights

    np.testing.assert_allclose(coefficients.I1 - coefficients.I2, weights * a2 * g / (2.0 * np.sqrt(n + 1.0)),
                               rtol=1e-10, atol=1e-18)

    f, h = coefficients.f, coefficients.h
    y = np.sqrt((n + 2.0) / (n + 1.0)) * (a2 - n - 1.0) / 8.0
    leftover = 2.0 * (f[0] * f[1] + h[0] * h[1]) - coefficients.R
    np.testing.assert_allclose(leftover, 2.0 * weights * (a2 ** 2 / 64.0 + y ** 2) * g ** 4, rtol=1e-8, atol=1e-18)


def test_full_inversion_components_sum_to_total(field, grid_40):
    g = 0.06
    parts = crwa_inversion_full(field, g, grid_40(g))
    rebuilt = (parts.constant + parts.gs_term.values + parts.rabi.values
               + parts.same_k.values + parts.diff_k.values)
    np.testing.assert_allclose(rebuilt, parts.total.values, atol=1e-12)
    assert set(parts.as_dict()) == {'gs_term', 'rabi', 'same_k', 'diff_k', 'total'}


def test_initial_inversion_values(field):
    g = 0.06
    grid = reduced_time_grid(1.0, 11, g)
    full = crwa_inversion_full(field, g, grid).total.values[0]
    assert full == pytest.approx(1.0 - field.mean_photons * g ** 2, abs=0.2 * field.mean_photons * g ** 2)
    assert crwa_inversion_concise(field, g, grid).values[0] == pytest.approx(1.0, abs=1e-11)


def test_concise_form_departs_from_full_at_second_order(field):
    distances = []
    for g in (0.04, 0.02):
        grid = reduced_time_grid(20.0, 2001, g)
        full = crwa_inversion_full(field, g, grid).total
        distances.append(full.sup_distance(crwa_inversion_concise(field, g, grid)))
    assert 3.0 <= distances[0] / distances[1] <= 5.0


def test_concise_parts_add_up(field):
    grid = reduced_time_grid(10.0, 501, 0.06)
    parts = crwa_inversion_concise_parts(field, 0.06, grid)
    np.testing.assert_allclose(parts['rabi'].values + parts['intrinsic'].values, parts['total'].values, atol=1e-14)
    np.testing.assert_allclose(parts['rabi'].values, rwa_inversion(field, 0.06, grid).values, atol=1e-12)


def test_ground_state_term_matches_level_form(small_field):
    g = 0.06
    grid = reduced_time_grid(40.0, 4001, g)
    parts = crwa_inversion_full(small_field, g, grid)
    amplitude = small_field.mean_photons * g ** 2 * math.exp(-small_field.mean_photons)
    assert parts.gs_term.values[0] == pytest.approx(amplitude)
    assert parts.gs_term.sup_distance(gs_term_from_levels(small_field, g, grid)) < 0.1 * amplitude


def test_same_k_oscillations_never_collapse(field):
    for g in (0.02, 0.06, 0.1):
        collapse_end = 2.0 * math.pi * field.alpha
        parts = crwa_inversion_full(field, g, reduced_time_grid(collapse_end, 4001, g))
        starts, amplitudes = sliding_window_amplitude(parts.same_k, width=2.0)
        inside = (starts >= 2.0) & (starts <= collapse_end - 2.0)
        assert amplitudes[inside].min() >= 0.3 * g * field.alpha


def test_same_k_carrier_period(field):
    g = 0.06
    grid = reduced_time_grid(20.0, 8001, g)
    tau, values = envelope_same_k(field, g, grid).window(4.0, 16.0)
    times = tau / (2.0 * g)
    crossing = np.flatnonzero(np.sign(values[:-1]) != np.sign(values[1:]))
    # Linear interpolation of each sign change
    roots = times[crossing] - values[crossing] * (times[crossing + 1] - times[crossing]) / (
        values[crossing + 1] - values[crossing])
    spacing = float(np.median(np.diff(roots)))
    assert spacing == pytest.approx(math.pi / carrier_frequency(g), rel=0.03)


def test_envelopes_reproduce_their_components(field, grid_40):
    g = 0.06
    grid = grid_40(g)
    concise = crwa_inversion_concise_parts(field, g, grid)['intrinsic'].values
    regrouped = envelope_same_k(field, g, grid).values + envelope_diff_k(field, g, grid).values
    np.testing.assert_allclose(regrouped, concise, atol=1e-10)


def test_same_k_single_term_approximant_half_period(field):
    g = 0.06
    grid = reduced_time_grid(40.0, 4001, g)
    starts, amplitudes = sliding_window_amplitude(envelope_same_k_approx(field, g, grid), width=2.0)
    middle = (starts >= 10.0) & (starts <= 30.0)
    node = starts[middle][np.argmin(amplitudes[middle])] + 1.0
    assert node == pytest.approx(2.0 * math.pi * math.sqrt(field.mean_photons + 1.0), abs=1.5)


def test_saddle_point_tracks_direct_sum(field):
    g = 0.06
    grid = reduced_time_grid(10.0, 2001, g)
    direct = diff_k_envelope_sum(field, g, grid)
    saddle = saddle_point_envelope(field.mean_photons, g, grid)
    peak_direct, peak_saddle = np.abs(direct.values).max(), np.abs(saddle.values).max()
    assert abs(peak_saddle - peak_direct) / peak_direct < 0.05
    assert direct.max_abs(8.0, 10.0) < 2e-4
    assert saddle.max_abs(8.0, 10.0) < 2e-4


def test_diff_k_approximant_collapses(field):
    g = 0.06
    grid = reduced_time_grid(10.0, 2001, g)
    approx = envelope_diff_k_approx(field, g, grid)
    assert approx.max_abs(8.0, 10.0) < g * field.mean_photons * 2e-4
    assert envelope_diff_k(field, g, grid).max_abs(0.0, 3.0) > 0.1 * g * field.alpha
    vacuum = envelope_diff_k_approx(coherent_field(0.0), g, grid)
    assert not vacuum.values.any()


def test_saddle_point_root():
    n_bar, g = 10.0, 0.06
    assert solve_saddle_point(n_bar, g, 0.0) == pytest.approx(n_bar)
    t = 20.0
    n0 = solve_saddle_point(n_bar, g, t)
    residual = np.log(n0 / n_bar) - 0.5j * g * t * (1.0 / np.sqrt(n0 + 1.0) + 1.0 / np.sqrt(n0 + 3.0))
    assert abs(residual) < 1e-10
    assert n0.imag > 0
    grid = reduced_time_grid(2.0, 5, g)
    _, diagnostic = saddle_point_envelope(n_bar, g, grid, diagnostic=True)
    np.testing.assert_allclose(diagnostic.n0_refined, diagnostic.n0_closed, rtol=0.1)
    with pytest.raises(ConfigError):
        saddle_point_envelope(0.0, g, grid)


def test_window_longer_than_series_is_rejected(field):
    series = rwa_inversion(field, 0.06, reduced_time_grid(1.0, 11, 0.06))
    with pytest.raises(ConfigError):
        sliding_window_amplitude(series, width=2.0)


def test_collapse_metrics_without_revival(field):
    g = 0.06
    series = crwa_inversion_full(field, g, reduced_time_grid(20.0, 2001, g)).total
    metrics = collapse_metrics(series, g, field.alpha)
    assert math.isnan(metrics.revival_amplitude)
    assert 0.5 <= metrics.intrinsic_ratio <= 2.0
    with pytest.raises(ConfigError):
        collapse_metrics(series, g, 0.0)


@pytest.mark.slow
def test_crwa_follows_exact_more_closely_than_rwa(field, eigensystem):
    g = 0.06
    grid = reduced_time_grid(40.0, 4001, g)
    exact = exact_inversion(eigensystem(g, exact_n_cut(field)), field, grid)
    crwa = crwa_inversion_full(field, g, grid).total
    rwa = rwa_inversion(field, g, grid)
    assert exact.sup_distance(crwa) < 0.3
    assert exact.sup_distance(crwa) < exact.sup_distance(rwa)
    assert exact.sup_distance(crwa, tau_max=20.0) < 0.15
