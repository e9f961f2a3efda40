"""General helper functions: file readers and the literal syntaxes used by the CLI."""

from __future__ import annotations

import json
import math
import re
from pathlib import Path, PurePath
from typing import Any, Dict, List, Union, cast

from dotenv import dotenv_values

_DYADIC_PATTERN = re.compile(r"^\s*(\d+)\s*(?:\^|\*\*)\s*(\d+)\s*$")


def read_json_file(path: Union[PurePath, str]) -> Dict[str, Any]:
    """Read json file, throwing an error if missing."""
    if not path:
        raise RuntimeError("Could not open file. Filepath not provided.")

    if not Path(path).exists():
        raise FileNotFoundError(f"File at '{path}' was not found.")

    return cast(dict, json.loads(Path(path).read_text()))


def read_flat_config_file(path: Union[PurePath, str]) -> Dict[str, Any]:
    """Read a flat key-value config file.

    JSON files are parsed as JSON. Anything else is read as ``KEY=value`` lines with
    python-dotenv, so shell-style comments and quoting work as in ``.env`` files.

    Args:
        path: Location of the config file.

    Returns:
        A flat dictionary with keys normalized to snake case.

    Raises:
        FileNotFoundError: If the file does not exist.
    """
    if not Path(path).is_file():
        raise FileNotFoundError(
            f"Could not locate config file at '{path}'. "
            "Please check that the file exists."
        )

    if str(path).endswith(".json"):
        raw: Dict[str, Any] = read_json_file(path)
    else:
        raw = {k: v for k, v in dotenv_values(str(path)).items() if v is not None}

    return {normalize_key(k): v for k, v in raw.items()}


def normalize_key(key: str) -> str:
    """Map a flag-like key (``--sigma-grid``, ``SIGMA_GRID``) to ``sigma_grid``."""
    return key.strip().lstrip("-").lower().replace("-", "_")


def parse_dyadic(value: Union[str, int]) -> int:
    """Parse an integer given either literally or as a power, like ``2^10``.

    Args:
        value: An integer, a decimal string, or ``base^exponent`` / ``base**exponent``.

    Returns:
        The integer value.

    Raises:
        ValueError: If the value cannot be parsed.
    """
    if isinstance(value, bool):
        raise ValueError(f"Expected an integer, got {value!r}.")
    if isinstance(value, int):
        return value

    text = str(value).strip()
    match = _DYADIC_PATTERN.match(text)
    if match:
        return int(match.group(1)) ** int(match.group(2))
    try:
        return int(text)
    except ValueError:
        raise ValueError(
            f"Could not parse '{value}' as an integer or 'b^j' literal."
        ) from None


def parse_int_list(value: Union[str, int, List[Any]]) -> List[int]:
    """Parse ``0..8``, ``1,2,2^4`` or a list into a list of integers.

    Ranges are inclusive on both ends.

    Args:
        value: The text or sequence to parse.

    Returns:
        The integers in the given order.

    Raises:
        ValueError: If a range is reversed or an item does not parse.
    """
    if isinstance(value, (list, tuple)):
        return [parse_dyadic(v) for v in value]

    result: List[int] = []
    for item in str(value).split(","):
        item = item.strip()
        if not item:
            continue
        if ".." in item:
            lo_text, hi_text = item.split("..", 1)
            lo, hi = parse_dyadic(lo_text), parse_dyadic(hi_text)
            if hi < lo:
                raise ValueError(f"Range '{item}' is reversed.")
            result.extend(range(lo, hi + 1))
        else:
            result.append(parse_dyadic(item))
    return result


def parse_float_list(value: Union[str, float, List[Any]]) -> List[float]:
    """Parse a comma list like ``0.1,0.25,0.35`` into floats."""
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    if isinstance(value, (int, float)):
        return [float(value)]
    return [float(item) for item in str(value).split(",") if item.strip()]


def format_float(value: float) -> str:
    """Format a float with 17 significant digits, which always round-trips."""
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, ".17g")
