# commands/envelopes.py
import click

from commands import common_options, execute
from commands.inversion import field_for
from dynamics import (diff_k_envelope_sum, envelope_diff_k, envelope_diff_k_approx, envelope_same_k,
                      envelope_same_k_approx, saddle_point_envelope)
from errors import ConfigError
from models import reduced_time_grid
from utils import setup_logger

logger = setup_logger(__name__)


def produce_envelopes(config, artifacts):
    field = field_for(config)
    if field.mean_photons == 0:
        raise ConfigError("Envelopes describe a coherent field and need alpha_sq > 0")
    g = config.g
    grid = reduced_time_grid(config.tau_max, config.n_points, g)

    columns = {
        'tau': grid.tau_values,
        'W_same_k': envelope_same_k(field, g, grid).values,
        'W_same_k_approx': envelope_same_k_approx(field, g, grid).values,
        'W_diff_k': envelope_diff_k(field, g, grid).values,
        'W_diff_k_approx': envelope_diff_k_approx(field, g, grid).values,
        'F_direct': diff_k_envelope_sum(field, g, grid).values,
        'F_saddle': saddle_point_envelope(field.mean_photons, g, grid).values,
    }
    artifacts.columns('', columns)


@click.command('envelopes')
@common_options
def envelopes_cmd(config_file, verbose, **flags):
    """Regrouped same-k and different-k oscillations next to their approximants.

    Reference run: envelopes --g 0.06 --alpha-sq 10 --tau-max 40
    """
    execute('envelopes', flags, config_file, verbose, produce_envelopes)
