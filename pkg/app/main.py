import logging
import sys
from typing import Optional, Sequence

import click
from pydantic import ValidationError

from app.commands.export import export_plot_command
from app.commands.optimize import continue_command, optimize_command
from app.commands.phases import phases_command
from app.commands.studies import min_time_command, sweep_command
from app.commands.verify import verify_command
from app.core.errors import QftPulseError
from app.core.logging import configure_logging

logger = logging.getLogger(__name__)


class QftPulseGroup(click.Group):
    """Click group that maps failures to exit codes: 1 user error, 2 runtime failure."""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            rv = super().main(args, prog_name, complete_var, standalone_mode=False, **extra)
            code = rv if isinstance(rv, int) else 0
        except click.ClickException as exc:
            exc.show()
            code = 1
        except click.exceptions.Abort:
            click.echo("Aborted!", err=True)
            code = 1
        except QftPulseError as exc:
            click.echo(f"error: {exc.detail}", err=True)
            code = exc.exit_code
        except ValidationError as exc:
            click.echo(f"error: invalid configuration: {exc.errors()[0]['msg']}", err=True)
            code = 1
        except Exception as exc:
            logger.exception("Unexpected failure")
            click.echo(f"error: {exc}", err=True)
            code = 2
        if standalone_mode:
            sys.exit(code)
        return code


@click.group(cls=QftPulseGroup)
@click.option("--log-level", default=None, help="Overrides QPF_LOG_LEVEL.")
def cli(log_level):
    """Krotov pulse synthesis for the qudit QFT on a quadrupole spin."""
    configure_logging(log_level)


# Register every subcommand on the group
cli.add_command(optimize_command)
cli.add_command(sweep_command)
cli.add_command(min_time_command)
cli.add_command(phases_command)
cli.add_command(continue_command)
cli.add_command(export_plot_command)
cli.add_command(verify_command)


def main(argv: Optional[Sequence[str]] = None) -> int:
    return cli.main(args=list(argv) if argv is not None else None, prog_name="qftpulse", standalone_mode=False)
