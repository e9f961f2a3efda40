"""Least-squares line fits used by the regularity diagnostics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LineFit:
    """Result of fitting ``y = intercept + slope * x``."""

    slope: float
    intercept: float
    r_squared: float
    residual: float  # root-mean-square residual
    count: int


def fit_line(x: np.ndarray, y: np.ndarray) -> LineFit:
    """Fit a straight line by least squares and report R².

    When ``y`` is constant the fit is exact and R² is reported as 1.

    Args:
        x: Abscissae, at least two distinct values.
        y: Ordinates, same length as ``x``.

    Returns:
        The fitted line.

    Raises:
        ValueError: If fewer than two points are given.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2 or x.size != y.size:
        raise ValueError("A line fit needs at least two (x, y) pairs.")

    slope, intercept = np.polyfit(x, y, 1)
    predicted = intercept + slope * x
    ss_res = float(np.sum((y - predicted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot <= 1e-24 * max(1.0, float(np.sum(y**2))):
        r_squared = 1.0
    else:
        r_squared = 1.0 - ss_res / ss_tot
    return LineFit(
        slope=float(slope),
        intercept=float(intercept),
        r_squared=r_squared,
        residual=float(np.sqrt(ss_res / x.size)),
        count=int(x.size),
    )
