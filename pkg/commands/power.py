# commands/power.py
import click

from commands import common_options, execute
from commands.inversion import field_for, inversion_by_backend
from dynamics import crwa_inversion_concise_parts
from models import reduced_time_grid
from spectrum import (component_spectra, default_frequency_grid, detect_peaks, higher_order_components,
                      match_predictions, power_spectrum, predict_peaks_first_order, predict_peaks_second_order)
from utils import setup_logger

logger = setup_logger(__name__)


def _spectra(config):
    field = field_for(config)
    grid = reduced_time_grid(config.tau_max, config.n_points, config.g)
    freq_grid = default_frequency_grid(config.tau_max, config.freq_max)
    spectra = {name: power_spectrum(series, freq_grid)
               for name, series in inversion_by_backend(config, field, grid).items()}
    return field, grid, freq_grid, spectra


def _predictions(config, field):
    return predict_peaks_first_order(config.g, field.alpha) + predict_peaks_second_order(config.g, field.alpha)


def produce_power(config, artifacts):
    field, grid, freq_grid, spectra = _spectra(config)
    any_spectrum = next(iter(spectra.values()))

    columns = {'freq': freq_grid, 'freq_abs': any_spectrum.absolute_freqs}
    columns.update({f'P_{name}': spectrum.power for name, spectrum in spectra.items()})
    if 'crwa' in config.backends:
        parts = crwa_inversion_concise_parts(field, config.g, grid)
        parts['order2'] = higher_order_components(field, config.g, grid, order=2)
        for name, spectrum in component_spectra(parts, freq_grid).items():
            columns[f'P_crwa_{name}'] = spectrum.power
    artifacts.columns('', columns, xlabel='omega / 2g', ylabel='|F(omega)|^2')

    artifacts.record('predictions', {
        'bin_width': any_spectrum.bin_width,
        'predictions': [prediction.as_dict() for prediction in _predictions(config, field)],
    })


def produce_peaks(config, artifacts):
    field, _, _, spectra = _spectra(config)
    predictions = _predictions(config, field)

    rows, detected = [], {}
    for name, spectrum in spectra.items():
        peaks = detect_peaks(spectrum, config.min_prominence)
        detected[name] = [peak.as_dict() for peak in peaks]
        for row in match_predictions(peaks, predictions, spectrum.bin_width):
            rows.append([name, row['label'], row['order'], row['predicted'], row['detected'],
                         row['offset_bins'], row['extent_bins'], row['matched']])
        logger.info(f"{name}: {len(peaks)} peaks above prominence {config.min_prominence}")

    header = ['backend', 'label', 'order', 'predicted', 'detected', 'offset_bins', 'extent_bins', 'matched']
    artifacts.rows('', header, rows)
    artifacts.record('detected', {'bin_width': next(iter(spectra.values())).bin_width, 'peaks': detected})


@click.command('power')
@click.option('--spectrum-bin', type=float, default=None, help='Frequency resolution in units of 2g; sets the default tau-max.')
@click.option('--freq-max', type=float, default=None, help='Highest frequency in units of 2g.')
@common_options
def power_cmd(config_file, verbose, **flags):
    """Power spectrum |F(omega)|^2 per backend plus predicted peak frequencies.

    Spectra by coupling: power --g 0.06, power --g 0.15 and power --g 0.2 with --alpha-sq 10.
    """
    execute('power', flags, config_file, verbose, produce_power)


@click.command('peaks')
@click.option('--spectrum-bin', type=float, default=None, help='Frequency resolution in units of 2g; sets the default tau-max.')
@click.option('--freq-max', type=float, default=None, help='Highest frequency in units of 2g.')
@click.option('--min-prominence', type=float, default=None, help='Peak prominence as a fraction of the highest power.')
@common_options
def peaks_cmd(config_file, verbose, **flags):
    """Detected spectral peaks matched against first- and second-order predictions."""
    execute('peaks', flags, config_file, verbose, produce_peaks)
