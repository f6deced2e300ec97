# tests/test_models.py
import math

import numpy as np
import pytest

from errors import ConfigError
from models import (ModelParams, TimeGrid, choose_truncation, coherent_amplitudes, coherent_amplitudes_logspace,
                    coherent_field, make_series, oscillation_sum, reduced_time_grid)


def test_model_params_rejects_negative_coupling_and_other_units():
    with pytest.raises(ConfigError):
        ModelParams(g=-0.1)
    with pytest.raises(ConfigError):
        ModelParams(g=0.1, omega=2.0)
    assert ModelParams(g=0.1).is_resonant
    assert ModelParams(g=0.1, delta_atom=1.5).detuning == pytest.approx(0.5)


def test_recurrence_matches_log_gamma_amplitudes():
    alpha = math.sqrt(10.0)
    field = coherent_amplitudes(alpha, 80)
    np.testing.assert_allclose(field.betas, coherent_amplitudes_logspace(alpha, 80), rtol=1e-12, atol=1e-300)


def test_truncation_is_smallest_index_meeting_tolerance():
    alpha, tol = math.sqrt(10.0), 1e-12
    field = coherent_field(alpha, tail_tol=tol)
    weights = coherent_amplitudes(alpha, 200).weights
    tail_after = lambda n: math.fsum(weights[n + 1:])  # noqa: E731
    assert field.tail_deficit <= tol
    assert tail_after(field.n_cut) < tol
    assert tail_after(field.n_cut - 1) >= tol
    assert field.n_cut == choose_truncation(alpha, tol)


def test_vacuum_field_keeps_a_single_level():
    field = coherent_field(0.0)
    assert field.n_cut == 0
    assert field.betas.tolist() == [1.0]
    assert field.tail_deficit == 0.0


@pytest.mark.parametrize('alpha', [-1.0, 1j, float('nan')])
def test_invalid_amplitudes_are_rejected(alpha):
    with pytest.raises(ConfigError):
        coherent_field(alpha)


def test_explicit_truncation_reports_deficit():
    field = coherent_field(math.sqrt(10.0), n_cut=10)
    assert field.n_cut == 10
    assert field.tail_deficit > 0.3


def test_field_arrays_are_read_only():
    field = coherent_field(1.0)
    with pytest.raises(ValueError):
        field.betas[0] = 0.0


def test_reduced_time_grid_converts_tau_to_time():
    grid = reduced_time_grid(40.0, 401, 0.05)
    assert grid.tau_max == 40.0
    assert grid.times[-1] == pytest.approx(400.0)
    assert grid.tau_step == pytest.approx(0.1)
    assert grid.time_step == pytest.approx(1.0)
    with pytest.raises(ConfigError):
        reduced_time_grid(40.0, 401, 0.0)
    with pytest.raises(ConfigError):
        reduced_time_grid(40.0, 1, 0.05)


def test_time_grid_must_be_uniform():
    with pytest.raises(ConfigError):
        TimeGrid(tau_values=np.array([0.0, 1.0, 3.0]), g_ref=0.1)


def test_series_comparison_and_windows():
    grid = reduced_time_grid(10.0, 101, 0.1)
    first = make_series(grid, np.sin(grid.tau_values), 'a')
    second = make_series(grid, np.zeros(len(grid)), 'b')
    assert first.sup_distance(second) == pytest.approx(1.0, abs=1e-3)
    assert first.sup_distance(second, tau_max=0.5) == pytest.approx(math.sin(0.5))
    assert first.max_abs(0.0, 0.0) == 0.0
    with pytest.raises(ConfigError):
        first.max_abs(20.0, 30.0)
    other_grid = reduced_time_grid(5.0, 101, 0.1)
    with pytest.raises(ConfigError):
        first.sup_distance(make_series(other_grid, np.zeros(101), 'c'))


def test_oscillation_sum_does_not_depend_on_chunking():
    amplitudes = np.linspace(0.1, 1.0, 25)
    frequencies = np.linspace(0.5, 3.0, 25)
    times = np.linspace(0.0, 50.0, 1001)
    whole = oscillation_sum(amplitudes, frequencies, times, chunk_size=5000)
    pieces = oscillation_sum(amplitudes, frequencies, times, chunk_size=7)
    np.testing.assert_allclose(whole, pieces, atol=1e-13)
    assert whole[0] == pytest.approx(amplitudes.sum())
    assert oscillation_sum(amplitudes, frequencies, times, kind='sin')[0] == 0.0
