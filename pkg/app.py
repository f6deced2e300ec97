# app.py
import sys

import click

from app_config import Config
from errors import EXIT_OK, EXIT_USAGE

REFERENCE_RUNS = """\b
Reference runs at alpha^2 = 10:
  inversion --g 0.02 --backends rwa,crwa,exact --tau-max 40
  inversion --g 0.06 --backends rwa,crwa,exact --tau-max 40
  components --g 0.06
  envelopes --g 0.06
  power --g 0.06 | power --g 0.15 | power --g 0.2
"""


class RabiGroup(click.Group):
    """Click group whose exit status is 1 for usage errors and the RabiError code otherwise."""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            result = super().main(args=args, prog_name=prog_name, complete_var=complete_var,
                                  standalone_mode=False, **extra)
        except click.UsageError as e:
            e.show()
            code = EXIT_USAGE
        except click.ClickException as e:
            e.show()
            code = e.exit_code
        except click.Abort:
            click.echo('Aborted!', err=True)
            code = EXIT_USAGE
        else:
            code = result if isinstance(result, int) else EXIT_OK
        if standalone_mode:
            sys.exit(code)
        return code


def create_app():
    app = RabiGroup(
        name='rabi-crwa',
        help='Quantum Rabi model: RWA, counter-rotating-wave (CRWA) and exact numerics.',
        epilog=REFERENCE_RUNS,
    )
    click.version_option(Config.VERSION, prog_name='rabi-crwa')(app)

    # Register commands
    from commands.components import components_cmd
    from commands.envelopes import envelopes_cmd
    from commands.inversion import inversion_cmd
    from commands.levels import levels_cmd
    from commands.power import peaks_cmd, power_cmd
    from commands.validate import validate_cmd

    for command in (levels_cmd, inversion_cmd, components_cmd, envelopes_cmd, power_cmd, peaks_cmd, validate_cmd):
        app.add_command(command)

    return app


app = create_app()

if __name__ == '__main__':
    app()
