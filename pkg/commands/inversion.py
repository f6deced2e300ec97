# commands/inversion.py
import math

import click

from commands import common_options, execute
from dynamics import collapse_metrics, crwa_inversion_full
from exact import exact_eigensystem, exact_inversion, exact_n_cut
from models import coherent_field, reduced_time_grid
from rwa import rwa_inversion
from utils import setup_logger

logger = setup_logger(__name__)


def field_for(config):
    return coherent_field(config.alpha, tail_tol=config.tail_tol, n_cut=config.n_cut)


def inversion_by_backend(config, field, grid):
    series = {}
    if 'rwa' in config.backends:
        series['rwa'] = rwa_inversion(field, config.g, grid)
    if 'crwa' in config.backends:
        series['crwa'] = crwa_inversion_full(field, config.g, grid).total
    if 'exact' in config.backends:
        eigensystem = exact_eigensystem(config.g, exact_n_cut(field))
        series['exact'] = exact_inversion(eigensystem, field, grid)
    return series


def produce_inversion(config, artifacts):
    field = field_for(config)
    grid = reduced_time_grid(config.tau_max, config.n_points, config.g)
    series = inversion_by_backend(config, field, grid)

    columns = {'tau': grid.tau_values}
    columns.update({f'W_{name}': s.values for name, s in series.items()})
    artifacts.columns('', columns)

    if field.alpha > 0 and config.tau_max >= 1.2 * math.pi * field.alpha:
        metrics = {name: collapse_metrics(s, config.g, field.alpha).as_dict() for name, s in series.items()}
        artifacts.record('metrics', {'collapse': metrics, 'n_cut': field.n_cut, 'tail_deficit': field.tail_deficit})


@click.command('inversion')
@common_options
def inversion_cmd(config_file, verbose, **flags):
    """Population inversion W(tau) per backend.

    Collapse comparison: inversion --g 0.02 --alpha-sq 10 --backends rwa,crwa,exact --tau-max 40
    and the same with --g 0.06.
    """
    execute('inversion', flags, config_file, verbose, produce_inversion)
