# commands/levels.py
import click

from commands import common_options, execute
from crwa import crwa_energy_closed, crwa_energy_series, ground_state
from exact import exact_eigensystem, match_level
from rwa import rwa_energy
from utils import setup_logger

logger = setup_logger(__name__)


def produce_levels(config, artifacts):
    g = config.g
    with_exact = 'exact' in config.backends
    eigensystem = exact_eigensystem(g, max(2 * config.n_max + 20, 40)) if with_exact else None

    header = ['k', 'n', 'E_rwa', 'E_crwa_closed', 'E_crwa_series']
    if with_exact:
        header += ['E_exact', 'closed_minus_exact', 'series_minus_exact', 'rwa_minus_exact']

    rows = []
    for n in range(config.n_max + 1):
        for k in (1, 2):
            row = [k, n, rwa_energy(k, n, g), crwa_energy_closed(k, n, g), crwa_energy_series(k, n, g)]
            if with_exact:
                exact = match_level(eigensystem, k, n)
                row += [exact, row[3] - exact, row[4] - exact, row[2] - exact]
            rows.append(row)
    artifacts.rows('', header, rows)

    ground_rows = []
    for order in (1, 2):
        state = ground_state(g, order)
        row = [order, state.energy, *state.vector]
        if with_exact:
            row += [eigensystem.ground_energy, state.energy - eigensystem.ground_energy]
        ground_rows.append(row)
    ground_header = ['order', 'E_gs', 'd_down0', 'd_up1', 'd_down2']
    if with_exact:
        ground_header += ['E_exact', 'gs_minus_exact']
    artifacts.rows('ground', ground_header, ground_rows)
    logger.info(f"Tabulated {len(rows)} levels for g={g}")


@click.command('levels')
@click.option('--n-max', type=int, default=None, help='Largest photon index n in the table.')
@common_options
def levels_cmd(config_file, verbose, **flags):
    """Level table E_kn: RWA, CRWA closed form, CRWA series and exact, with differences.

    Example: levels --g 0.1 --n-max 10
    """
    execute('levels', flags, config_file, verbose, produce_levels)
