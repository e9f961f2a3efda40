"""The ``rough-harmonics`` command group and its exit-code contract."""

from __future__ import annotations

import logging
import os
import sys
from typing import List, Optional

import click

from rough_harmonics.exceptions import (
    ConfigValidationError,
    DomainError,
    RoughHarmonicsError,
    VerificationFailed,
)
from rough_harmonics.experiment_base import PACKAGE_NAME
from rough_harmonics.experiments import EXPERIMENTS

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFICATION_FAILED = 2

logger = logging.getLogger(PACKAGE_NAME)


def configure_logging() -> None:
    """Install one stderr handler, level from ROUGH_HARMONICS_LOGLEVEL or LOGLEVEL."""
    level = (
        os.environ.get("ROUGH_HARMONICS_LOGLEVEL") or os.environ.get("LOGLEVEL") or "INFO"
    ).upper()
    logging.basicConfig(
        level=level if isinstance(logging.getLevelName(level), int) else "INFO",
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


@click.group(name=PACKAGE_NAME, context_settings={"help_option_names": ["--help"]})
@click.version_option(
    package_name=PACKAGE_NAME, message=f"{PACKAGE_NAME} v%(version)s"
)
def cli() -> None:
    """Irregular harmonic functions on the unit ball: series, regularity and transmission."""


for _experiment in EXPERIMENTS.values():
    cli.add_command(_experiment.cli)


def run(argv: Optional[List[str]] = None) -> int:
    """Run the command line and map the outcome to an exit code.

    Args:
        argv: Arguments without the program name (default: ``sys.argv[1:]``).

    Returns:
        0 on success, 2 when a verification failed and 1 on usage or input errors.
    """
    configure_logging()
    try:
        cli.main(args=argv, prog_name=PACKAGE_NAME, standalone_mode=False)
    except VerificationFailed as ex:
        logger.error("%s", ex)
        return EXIT_VERIFICATION_FAILED
    except click.exceptions.Exit as ex:
        return int(ex.exit_code)
    except click.ClickException as ex:
        ex.show()
        return EXIT_USAGE
    except click.exceptions.Abort:
        click.echo("Aborted!", err=True)
        return EXIT_USAGE
    except (ConfigValidationError, DomainError, FileNotFoundError) as ex:
        click.echo(f"Error: {ex}", err=True)
        return EXIT_USAGE
    except (RoughHarmonicsError, ValueError, OSError) as ex:
        click.echo(f"Error: {type(ex).__name__}: {ex}", err=True)
        return EXIT_USAGE
    return EXIT_OK


def main() -> None:
    """Console-script entry point."""
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
