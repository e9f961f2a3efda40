"""Common CLI options for experiments.

Values are read as strings and coerced against the experiment's settings schema, so
``--K 2^10`` and ``--k 0..8`` parse the same way on the command line and in config files.
"""

import click

EXPERIMENT_VERSION = click.option(
    "--version",
    is_flag=True,
    help="Display the package version.",
)

EXPERIMENT_ABOUT = click.option(
    "--about",
    is_flag=True,
    help="Display the subcommand settings and output columns.",
)

OUTPUT_FORMAT = click.option(
    "--format",
    help="Output format; 'markdown' is only valid with --about.",
    type=click.Choice(["csv", "json", "markdown"], case_sensitive=False),
    default=None,
)

EXPERIMENT_CONFIG = click.option(
    "--config",
    multiple=True,
    help="Flat key-value or JSON config file; may be repeated, later files win.",
    type=click.STRING,
    default=(),
)

OUTPUT_FILE = click.option(
    "--output",
    help="Write the result to this file instead of standard out.",
    type=click.STRING,
)

N_JOBS = click.option(
    "--n-jobs",
    help="joblib workers for independent computations.",
    type=click.STRING,
)

DIMENSION = click.option("--n", help="Ambient dimension n.", type=click.STRING)

VARIANT = click.option("--variant", help="Series or example variant.", type=click.STRING)

TRUNCATION = click.option("--K", help="Truncation degree K, e.g. 1024 or 2^10.", type=click.STRING)

SEED = click.option("--seed", help="Seed for random harmonics and samples.", type=click.STRING)

TOLERANCE = click.option("--tol", help="Tail tolerance.", type=click.STRING)

ALPHA = click.option("--alpha", help="Exponent alpha in (0, 1).", type=click.STRING)

BASE = click.option("--b", help="Integer base b >= 2.", type=click.STRING)

RHO = click.option("--rho", help="Coefficient scale rho.", type=click.STRING)

COMMON_OPTIONS = (
    EXPERIMENT_VERSION,
    EXPERIMENT_ABOUT,
    OUTPUT_FORMAT,
    EXPERIMENT_CONFIG,
    OUTPUT_FILE,
    N_JOBS,
)
