# commands/validate.py
import click

from commands import execute
from errors import ConfigError, ValidationFailure
from utils import setup_logger
from validation import CHECKS, run_checks

logger = setup_logger(__name__)


def produce_validation(names):
    def producer(config, artifacts):
        unknown = [name for name in names if name not in CHECKS]
        if unknown:
            raise ConfigError(f"Unknown checks: {', '.join(unknown)}; available: {', '.join(CHECKS)}")
        results = run_checks(quick=config.quick, names=names)
        artifacts.record('report', {
            'quick': config.quick,
            'passed': all(result.passed for result in results),
            'checks': [result.as_dict() for result in results],
        })
        for result in results:
            click.echo(f"{'PASS' if result.passed else 'FAIL'}  {result.name}  ({result.elapsed:.1f}s)")
        failed = [result.name for result in results if not result.passed]
        if failed:
            raise ValidationFailure(f"{len(failed)} of {len(results)} checks failed", failed=failed)
    return producer


@click.command('validate')
@click.option('--quick', is_flag=True, default=None, help='Skip the slow exact-spectrum and fidelity checks.')
@click.option('--check', 'checks', multiple=True, help='Run only the named check; repeatable.')
@click.option('--output', '-o', type=str, default=None, help='Output path stem for the JSON report.')
@click.option('--config', 'config_file', type=click.Path(dir_okay=False), default=None, help='JSON config file.')
@click.option('--verbose', '-v', is_flag=True, default=False, help='Debug logging.')
def validate_cmd(config_file, verbose, checks, **flags):
    """Run the acceptance checks and write a JSON report; exit status 2 when any fails."""
    execute('validate', flags, config_file, verbose, produce_validation(list(checks)))
