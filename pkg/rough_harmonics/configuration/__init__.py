"""Configuration parsing and handling."""
# flake8: noqa

from rough_harmonics.configuration._dict_config import (
    ENV_PREFIX,
    coerce_config,
    merge_config_sources,
    parse_environment_config,
)
