"""Settings shared by several experiments."""

from __future__ import annotations

from typing import Any, Dict, Optional

from rough_harmonics.series import BallSeries, SeriesVariant, build_series
from rough_harmonics.typing import (
    DyadicIntegerType,
    IntegerType,
    NumberType,
    Property,
    PropertiesList,
    StringType,
)

# `hadamard` is accepted as a short name of the disk variant.
VARIANT_ALIASES = {"hadamard": SeriesVariant.HADAMARD_2D.value}
SERIES_VARIANT_NAMES = [v.value for v in SeriesVariant if v is not SeriesVariant.CUSTOM] + list(
    VARIANT_ALIASES
)


def dimension_property(default: Optional[int] = None) -> Property:
    """The ambient dimension n."""
    return Property(
        "n",
        IntegerType,
        required=default is None,
        default=default,
        description="Ambient dimension n >= 2.",
    )


def truncation_property(default: int) -> Property:
    """The truncation K, accepting ``2^j``."""
    return Property("k", DyadicIntegerType, default=default, description="Truncation K.")


SERIES_CONFIG = PropertiesList(
    Property(
        "variant",
        StringType,
        required=True,
        allowed_values=SERIES_VARIANT_NAMES,
        description="Ball-series construction.",
    ),
    dimension_property(),
    Property("seed", IntegerType, description="Seed of the random harmonics."),
    Property("alpha", NumberType, description="Exponent of the Hölder schedule."),
    Property("rho", NumberType, default=1.0, description="Coefficient scale."),
)


def series_variant(name: str) -> SeriesVariant:
    """Resolve a variant name, including the short aliases."""
    return SeriesVariant(VARIANT_ALIASES.get(name, name))


def build_configured_series(config: Dict[str, Any], k_max: Optional[int] = None) -> BallSeries:
    """Build the series described by the shared settings."""
    return build_series(
        series_variant(config["variant"]),
        int(config["n"]),
        int(k_max if k_max is not None else config["k"]),
        scale=float(config.get("rho") or 1.0),
        seed=config.get("seed"),
        alpha=config.get("alpha"),
    )
