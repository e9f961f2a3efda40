"""Helpers for parsing and wrangling run-configuration dictionaries."""

from __future__ import annotations

import logging
import os
from typing import Any, Dict, Iterable, Mapping, Optional

from dotenv import find_dotenv
from dotenv.main import DotEnv

from rough_harmonics.helpers._util import (
    normalize_key,
    parse_dyadic,
    parse_float_list,
    parse_int_list,
    read_flat_config_file,
)
from rough_harmonics.typing import schema_types

logger = logging.getLogger(__name__)

ENV_PREFIX = "ROUGH_HARMONICS_"
# The one setting that may come from the environment.
ENV_SETTINGS = ("output_dir",)

_TRUE_VALUES = {"1", "true", "yes", "on"}
_FALSE_VALUES = {"0", "false", "no", "off"}


def parse_environment_config(
    prefix: str = ENV_PREFIX,
    dotenv_path: Optional[str] = None,
) -> Dict[str, Any]:
    """Parse configuration from environment variables.

    Only ``<PREFIX>OUTPUT_DIR`` is read; every other setting comes from flags or files.

    Args:
        prefix: Prefix for environment variables.
        dotenv_path: Path to a .env file. If None, will try to find one in increasingly
            higher folders.

    Returns:
        A configuration dictionary.
    """
    result: Dict[str, Any] = {}

    if not dotenv_path:
        dotenv_path = find_dotenv(usecwd=True)

    if dotenv_path:
        logger.debug("Loading configuration from %s", dotenv_path)
        DotEnv(dotenv_path).set_as_environment_variables()

    for config_key in ENV_SETTINGS:
        env_var_name = prefix + config_key.upper()
        if env_var_name in os.environ:
            logger.info(
                "Parsing '%s' config from env variable '%s'.",
                config_key,
                env_var_name,
            )
            result[config_key] = os.environ[env_var_name]
    return result


def _coerce_scalar(value: Any, type_dict: Mapping[str, Any]) -> Any:
    types = schema_types(type_dict)
    if value is None or not isinstance(value, str):
        if "integer" in types and isinstance(value, float) and value.is_integer():
            return int(value)
        return value
    text = value.strip()
    if "null" in types and text == "":
        return None
    if "integer" in types:
        return parse_dyadic(text)
    if "number" in types:
        return float(text)
    if "boolean" in types:
        lowered = text.lower()
        if lowered in _TRUE_VALUES:
            return True
        if lowered in _FALSE_VALUES:
            return False
        raise ValueError(f"Could not parse '{value}' as a boolean.")
    return value


def coerce_config(config: Mapping[str, Any], config_schema: Mapping[str, Any]) -> Dict[str, Any]:
    """Convert string values to the types the schema declares.

    Integers accept ``b^j`` literals; integer arrays accept comma lists and ``a..b`` ranges;
    number arrays accept comma lists. Keys without a schema entry are kept unchanged so
    that validation can report them.

    Raises:
        ValueError: If a value does not parse as its declared type.
    """
    properties = config_schema.get("properties", {})
    result: Dict[str, Any] = {}
    for raw_key, value in config.items():
        key = normalize_key(raw_key) if normalize_key(raw_key) in properties else raw_key
        type_dict = properties.get(key)
        if type_dict is None or value is None:
            result[key] = value
            continue
        if "array" in schema_types(type_dict):
            item_types = schema_types(type_dict.get("items", {}))
            if "integer" in item_types:
                value = parse_int_list(value)
            elif "number" in item_types:
                value = parse_float_list(value)
            elif isinstance(value, str):
                value = [item.strip() for item in value.split(",") if item.strip()]
        else:
            value = _coerce_scalar(value, type_dict)
        result[key] = value
    return result


def merge_config_sources(
    inputs: Iterable[str],
    config_schema: Dict[str, Any],
    env_prefix: str = ENV_PREFIX,
    overrides: Optional[Mapping[str, Any]] = None,
) -> Dict[str, Any]:
    """Merge configuration from multiple sources into a single dictionary.

    Later sources win: files in the given order (or the literal ``ENV``), then
    ``overrides`` (the flags given on the command line, ``None`` values skipped).

    Args:
        inputs: A sequence of configuration sources (file paths or ENV).
        config_schema: A JSON Schema dictionary for the configuration.
        env_prefix: Prefix for environment variables.
        overrides: Values that take precedence over every source.

    Raises:
        FileNotFoundError: If any of config files does not exist.

    Returns:
        A single configuration dictionary, coerced to the schema types.
    """
    config: Dict[str, Any] = {}
    for config_path in inputs:
        if config_path == "ENV":
            config.update(parse_environment_config(prefix=env_prefix))
            continue

        config.update(read_flat_config_file(config_path))

    for key, value in (overrides or {}).items():
        if value is not None:
            config[normalize_key(key)] = value

    return coerce_config(config, config_schema)
