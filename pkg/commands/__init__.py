# commands/__init__.py
import math

import click
import numpy as np

from errors import EXIT_NUMERICAL, RabiError, ValidationFailure
from run_config import FORMATS, build_run_config
from utils import remove_partial, set_log_level, setup_logger, write_columns_csv, write_csv, write_json, write_svg

logger = setup_logger(__name__)


def common_options(func):
    """Options shared by every command; unset options fall back to the config file, then defaults."""
    options = [
        click.option('--g', 'g', type=float, default=None, help='Coupling strength g in units of the cavity frequency.'),
        click.option('--alpha-sq', type=float, default=None, help='Mean photon number alpha^2 of the initial field.'),
        click.option('--backends', type=str, default=None, help='Comma-separated subset of rwa,crwa,exact.'),
        click.option('--tau-max', type=float, default=None, help='Largest reduced time tau = 2gt.'),
        click.option('--n-points', type=int, default=None, help='Samples on the reduced-time grid.'),
        click.option('--n-cut', type=int, default=None, help='Fock truncation of the field (default: from --tail-tol).'),
        click.option('--tail-tol', type=float, default=None, help='Allowed coherent-state weight beyond the truncation.'),
        click.option('--output', '-o', type=str, default=None, help='Output path stem.'),
        click.option('--format', 'format', type=click.Choice(FORMATS), default=None, help='Artifact format.'),
        click.option('--config', 'config_file', type=click.Path(dir_okay=False), default=None,
                     help='JSON file with RunConfig fields; flags win over it.'),
        click.option('--verbose', '-v', is_flag=True, default=False, help='Debug logging.'),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _clean_json(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {key: _clean_json(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean_json(item) for item in value]
    return value


class Artifacts:
    """Writes a command's outputs and remembers every path for cleanup on failure."""

    def __init__(self, config):
        self.config = config
        self.paths = []
        self.metadata = config.as_metadata()

    def _claim(self, suffix, extension):
        path = self.config.artifact_path(suffix, extension)
        self.paths.append(path)
        return path

    def columns(self, suffix, columns, xlabel='tau', ylabel='W'):
        """Numeric columns; the first column is the x axis of the SVG rendering."""
        fmt = self.config.format
        if fmt == 'csv':
            return write_columns_csv(self._claim(suffix, 'csv'), columns, self.metadata)
        if fmt == 'json':
            payload = {'columns': {name: np.asarray(values).tolist() for name, values in columns.items()}}
            return write_json(self._claim(suffix, 'json'), _clean_json(payload), self.metadata)
        names = list(columns)
        series = {name: columns[name] for name in names[1:]}
        return write_svg(self._claim(suffix, 'svg'), columns[names[0]], series, xlabel, ylabel,
                         title=f"{self.config.command} g={self.config.g} alpha^2={self.config.alpha_sq}")

    def rows(self, suffix, header, rows):
        """Mixed-type table; SVG has no tabular rendering so it falls back to CSV."""
        if self.config.format == 'json':
            payload = {'rows': [dict(zip(header, row)) for row in rows]}
            return write_json(self._claim(suffix, 'json'), _clean_json(payload), self.metadata)
        return write_csv(self._claim(suffix, 'csv'), header, rows, self.metadata)

    def record(self, suffix, payload):
        return write_json(self._claim(suffix, 'json'), _clean_json(payload), self.metadata)


def execute(command, flags, config_file, verbose, producer):
    """
    Build the RunConfig, run the producer and map failures onto exit codes.

    Parameters:
    - command: RunConfig command name
    - flags: options given on the command line
    - config_file: optional JSON config path
    - verbose: switch logging to DEBUG
    - producer: callable(config, artifacts)
    """
    if verbose:
        set_log_level('DEBUG')
    artifacts = None
    try:
        config = build_run_config(command, flags, config_file)
        logger.debug(f"Effective config for {command}: {config.as_metadata()}")
        artifacts = Artifacts(config)
        producer(config, artifacts)
    except ValidationFailure as e:
        logger.error(f"{command}: {e}")
        click.echo(f"Validation failed: {', '.join(e.failed)}", err=True)
        raise click.exceptions.Exit(e.exit_code)
    except RabiError as e:
        logger.error(f"{command} failed: {e}")
        if artifacts is not None:
            remove_partial(artifacts.paths)
        click.echo(f"Error: {e}", err=True)
        raise click.exceptions.Exit(e.exit_code)
    except OSError as e:
        logger.error(f"{command} could not write its outputs: {e}")
        if artifacts is not None:
            remove_partial(artifacts.paths)
        click.echo(f"Error: cannot write output: {e}", err=True)
        raise click.exceptions.Exit(EXIT_NUMERICAL)

    for path in artifacts.paths:
        click.echo(path)
