# tests/test_cli.py
import csv
import json
import os

import pytest
from click.testing import CliRunner

import commands
import commands.power
from app import create_app
from errors import SpectrumError
from validation import CheckSpec


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def app():
    return create_app()


def read_table(path):
    with open(path, encoding='utf-8') as handle:
        lines = handle.read().splitlines()
    metadata = [line for line in lines if line.startswith('#')]
    rows = list(csv.reader(line for line in lines if not line.startswith('#')))
    return metadata, rows[0], rows[1:]


def test_help_lists_commands_and_reference_runs(runner, app):
    result = runner.invoke(app, ['--help'])
    assert result.exit_code == 0
    for name in ('levels', 'inversion', 'components', 'envelopes', 'power', 'peaks', 'validate'):
        assert name in result.output
    assert 'Reference runs' in result.output


def test_levels_table(runner, app, tmp_path):
    stem = str(tmp_path / 'levels')
    result = runner.invoke(app, ['levels', '--g', '0.1', '--n-max', '3', '--output', stem])
    assert result.exit_code == 0, result.output

    metadata, header, rows = read_table(stem + '.csv')
    assert metadata[0].startswith('# version: ')
    assert header[:5] == ['k', 'n', 'E_rwa', 'E_crwa_closed', 'E_crwa_series']
    assert 'E_exact' in header
    assert len(rows) == 8
    assert os.path.exists(stem + '_ground.csv')


def test_inversion_columns_follow_backends(runner, app, tmp_path):
    stem = str(tmp_path / 'inv')
    result = runner.invoke(app, ['inversion', '--g', '0.06', '--backends', 'rwa,crwa', '--tau-max', '10',
                                 '--n-points', '201', '-o', stem])
    assert result.exit_code == 0, result.output
    _, header, rows = read_table(stem + '.csv')
    assert header == ['tau', 'W_rwa', 'W_crwa']
    assert len(rows) == 201
    assert float(rows[0][1]) == pytest.approx(1.0, abs=1e-10)


def test_outputs_are_byte_identical_across_runs(runner, app, tmp_path):
    stem = str(tmp_path / 'repeat')
    args = ['inversion', '--g', '0.06', '--backends', 'rwa,crwa,exact', '--tau-max', '5', '--n-points', '101',
            '-o', stem]
    assert runner.invoke(app, args).exit_code == 0
    with open(stem + '.csv', 'rb') as handle:
        first = handle.read()
    assert runner.invoke(app, args).exit_code == 0
    with open(stem + '.csv', 'rb') as handle:
        assert handle.read() == first


@pytest.mark.parametrize('args', [
    ['inversion', '--backends', 'rwa,qed'],
    ['inversion', '--g', '-0.1'],
    ['inversion', '--g', '0'],
    ['inversion', '--tau-max', '-1'],
    ['inversion', '--no-such-flag'],
    ['bogus'],
])
def test_invalid_input_exits_with_usage_status(runner, app, tmp_path, args):
    result = runner.invoke(app, args + ['-o', str(tmp_path / 'bad')] if args[0] != 'bogus' else args)
    assert result.exit_code == 1
    assert not list(tmp_path.iterdir())


def test_config_file_precedence(runner, app, tmp_path):
    config = tmp_path / 'run.json'
    config.write_text(json.dumps({'g': 0.02, 'tau_max': 5.0, 'n_points': 51, 'backends': ['rwa']}))
    stem = str(tmp_path / 'precedence')
    result = runner.invoke(app, ['inversion', '--config', str(config), '--g', '0.06', '-o', stem])
    assert result.exit_code == 0, result.output
    metadata, header, rows = read_table(stem + '.csv')
    assert '# g: 0.06' in metadata
    assert '# tau_max: 5.0' in metadata
    assert header == ['tau', 'W_rwa']
    assert len(rows) == 51


def test_config_file_with_unknown_key_is_rejected(runner, app, tmp_path):
    config = tmp_path / 'run.json'
    config.write_text(json.dumps({'coupling': 0.1}))
    result = runner.invoke(app, ['inversion', '--config', str(config), '-o', str(tmp_path / 'x')])
    assert result.exit_code == 1


def test_json_and_svg_formats(runner, app, tmp_path):
    base = ['components', '--g', '0.06', '--tau-max', '5', '--n-points', '101']
    assert runner.invoke(app, base + ['--format', 'json', '-o', str(tmp_path / 'parts')]).exit_code == 0
    with open(tmp_path / 'parts.json', encoding='utf-8') as handle:
        document = json.load(handle)
    assert document['metadata']['g'] == 0.06
    assert set(document['columns']) >= {'tau', 'W_gs', 'W_rabi', 'W_same_k', 'W_diff_k', 'W_crwa'}

    assert runner.invoke(app, base + ['--format', 'svg', '-o', str(tmp_path / 'parts')]).exit_code == 0
    assert (tmp_path / 'parts.svg').read_text(encoding='utf-8').lstrip().startswith('<?xml')


def test_envelopes_command(runner, app, tmp_path):
    stem = str(tmp_path / 'env')
    result = runner.invoke(app, ['envelopes', '--g', '0.06', '--tau-max', '10', '--n-points', '501', '-o', stem])
    assert result.exit_code == 0, result.output
    _, header, _ = read_table(stem + '.csv')
    assert header == ['tau', 'W_same_k', 'W_same_k_approx', 'W_diff_k', 'W_diff_k_approx', 'F_direct', 'F_saddle']


def test_power_writes_spectrum_and_predictions(runner, app, tmp_path):
    stem = str(tmp_path / 'power')
    result = runner.invoke(app, ['power', '--g', '0.2', '--alpha-sq', '2', '--backends', 'rwa,crwa',
                                 '--n-points', '2001', '--freq-max', '10', '-o', stem])
    assert result.exit_code == 0, result.output
    _, header, rows = read_table(stem + '.csv')
    assert header[:4] == ['freq', 'freq_abs', 'P_rwa', 'P_crwa']
    assert 'P_crwa_intrinsic' in header
    assert float(rows[1][0]) == pytest.approx(0.1)
    with open(stem + '_predictions.json', encoding='utf-8') as handle:
        predictions = json.load(handle)
    assert predictions['bin_width'] == pytest.approx(0.1)
    assert {p['label'] for p in predictions['predictions']} >= {'rabi', 'omega_d_k2', 'Omega_s_k1'}


def test_peaks_table(runner, app, tmp_path):
    stem = str(tmp_path / 'peaks')
    result = runner.invoke(app, ['peaks', '--g', '0.1', '--backends', 'crwa', '--n-points', '4001', '-o', stem])
    assert result.exit_code == 0, result.output
    _, header, rows = read_table(stem + '.csv')
    assert header == ['backend', 'label', 'order', 'predicted', 'detected', 'offset_bins', 'extent_bins', 'matched']
    assert {row[1] for row in rows} >= {'rabi', 'omega_s_k1', 'Omega_d_k2'}
    assert os.path.exists(stem + '_detected.json')


def test_numerical_failure_removes_partial_outputs(runner, app, tmp_path, monkeypatch):
    def failing(g, alpha):
        raise SpectrumError('prediction failed')

    monkeypatch.setattr(commands.power, 'predict_peaks_first_order', failing)
    stem = str(tmp_path / 'partial')
    result = runner.invoke(app, ['power', '--g', '0.2', '--alpha-sq', '2', '--backends', 'rwa',
                                 '--n-points', '2001', '--freq-max', '10', '-o', stem])
    assert result.exit_code == 2
    assert not os.path.exists(stem + '.csv')
    assert not os.path.exists(stem + '_predictions.json')


def test_validate_writes_report(runner, app, tmp_path):
    stem = str(tmp_path / 'validation')
    result = runner.invoke(app, ['validate', '--check', 'cubic_roots', '--check', 'ground_state', '-o', stem])
    assert result.exit_code == 0, result.output
    with open(stem + '_report.json', encoding='utf-8') as handle:
        report = json.load(handle)
    assert report['passed']
    assert [check['name'] for check in report['checks']] == ['cubic_roots', 'ground_state']


def test_failed_validation_exits_with_status_two(runner, app, tmp_path, monkeypatch):
    import validation
    monkeypatch.setitem(validation.CHECKS, 'always_fails',
                        CheckSpec('always_fails', lambda: (False, {'reason': 'forced'}), True, ''))
    stem = str(tmp_path / 'validation')
    result = runner.invoke(app, ['validate', '--check', 'always_fails', '-o', stem])
    assert result.exit_code == 2
    with open(stem + '_report.json', encoding='utf-8') as handle:
        report = json.load(handle)
    assert not report['passed']


def test_unknown_check_name_is_a_usage_error(runner, app, tmp_path):
    result = runner.invoke(app, ['validate', '--check', 'nope', '-o', str(tmp_path / 'v')])
    assert result.exit_code == 1


def test_explicit_n_cut_is_kept(runner, app, tmp_path):
    stem = str(tmp_path / 'short')
    result = runner.invoke(app, ['inversion', '--g', '0.06', '--backends', 'rwa', '--n-cut', '10', '--tau-max', '5',
                                 '--n-points', '51', '-o', stem])
    assert result.exit_code == 0, result.output
    metadata, _, rows = read_table(stem + '.csv')
    assert '# n_cut: 10' in metadata
    # W_rwa(0) is the weight kept below the cut, P(n <= 10) for a mean of 10
    assert float(rows[0][1]) == pytest.approx(0.58304, abs=1e-4)


def test_write_failure_removes_partial_outputs(runner, app, tmp_path, monkeypatch):
    def failing(path, payload, metadata):
        raise OSError(28, 'No space left on device')

    monkeypatch.setattr(commands, 'write_json', failing)
    stem = str(tmp_path / 'full')
    result = runner.invoke(app, ['power', '--g', '0.2', '--alpha-sq', '2', '--backends', 'rwa',
                                 '--n-points', '2001', '--freq-max', '10', '-o', stem])
    assert result.exit_code == 2
    assert not os.path.exists(stem + '.csv')
    assert not list(tmp_path.iterdir())
