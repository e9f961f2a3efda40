"""Weierstrass and Hardy lacunary cosine series, their Hölder constant, and circle lifts."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Any, Optional, Tuple, Union

import numpy as np
from scipy.special import zeta

from rough_harmonics.exceptions import DomainError, IncompatibleVariantError
from rough_harmonics.helpers._enums import ValueEnum
from rough_harmonics.series import BallSeries, SeriesVariant

logger = logging.getLogger(__name__)

# Frequencies above 2^52 lose every bit of the phase in double precision.
_MAX_FREQUENCY_BITS = 52


class AmplitudeLaw(ValueEnum):
    """Amplitude laws of the lacunary series."""

    #: b^(-j alpha)
    WEIERSTRASS = "weierstrass"

    #: j^-2, indexed from j = 1
    HARDY = "hardy"


@dataclass(frozen=True)
class LacunaryCosineSeries:
    """f(t) = scale * sum_{j >= start} A_j cos(b^j t).

    Hardy's amplitude 1/j^2 is undefined at j = 0, so the Hardy law always starts at j=1.

    Attributes:
        base: Integer base b >= 2.
        law: Amplitude law.
        alpha: Hölder exponent of the Weierstrass law, in (0, 1).
        terms: Number of retained terms J; 0 picks J from the tolerance.
        start: First index j.
        scale: Overall multiplier.
    """

    base: int
    law: AmplitudeLaw = AmplitudeLaw.WEIERSTRASS
    alpha: Optional[float] = None
    terms: int = 0
    start: Optional[int] = None
    scale: float = 1.0

    def __post_init__(self) -> None:
        if int(self.base) != self.base or self.base < 2:
            raise DomainError(f"The base must be an integer >= 2, got {self.base}.")
        if self.law is AmplitudeLaw.WEIERSTRASS:
            if self.alpha is None or not 0.0 < self.alpha < 1.0:
                raise DomainError(f"Weierstrass exponent must lie in (0, 1), got {self.alpha}.")
        if self.start is None:
            object.__setattr__(
                self, "start", 1 if self.law is AmplitudeLaw.HARDY else 0
            )
        if self.law is AmplitudeLaw.HARDY and self.start < 1:
            raise DomainError("Hardy amplitudes 1/j^2 need j >= 1.")
        if self.terms < 0:
            raise DomainError(f"Term count must be nonnegative, got {self.terms}.")

    @property
    def max_terms(self) -> int:
        """Largest J whose frequencies stay below 2^52."""
        return max(1, int(_MAX_FREQUENCY_BITS / math.log2(self.base)) - int(self.start) + 1)

    def amplitude(self, j: int) -> float:
        """A_j times the scale."""
        if self.law is AmplitudeLaw.HARDY:
            return self.scale / float(j * j)
        return self.scale * float(self.base) ** (-j * float(self.alpha))

    def tail_bound(self, terms: int) -> float:
        """sum of |A_j| over the omitted indices j >= start + terms."""
        first = int(self.start) + terms
        if self.law is AmplitudeLaw.HARDY:
            return abs(self.scale) * float(zeta(2.0, first))
        ratio = float(self.base) ** (-float(self.alpha))
        return abs(self.scale) * ratio**first / (1.0 - ratio)

    def terms_for_tol(self, tol: float) -> int:
        """Smallest J with tail_bound(J) <= tol, capped at :attr:`max_terms`."""
        if self.law is AmplitudeLaw.WEIERSTRASS:
            ratio = float(self.base) ** (-float(self.alpha))
            needed = math.log(tol * (1.0 - ratio) / abs(self.scale)) / math.log(ratio)
            terms = max(1, int(math.ceil(needed)) - int(self.start))
        else:
            terms = max(1, int(math.ceil(abs(self.scale) / tol)) + 1)
        return min(terms, self.max_terms)

    def resolved_terms(self, tol: float = 1e-10) -> int:
        """J to use: the fixed truncation if set, else one chosen from ``tol``."""
        return min(self.terms, self.max_terms) if self.terms else self.terms_for_tol(tol)

    def with_terms(self, terms: int) -> "LacunaryCosineSeries":
        """Return the same series with a fixed truncation."""
        return replace(self, terms=terms)

    def __call__(self, t: Any, tol: float = 1e-10):
        """Evaluate the truncation at t (scalar or array)."""
        t_array = np.asarray(t, dtype=float)
        values = np.zeros_like(t_array)
        first = int(self.start)
        for j in range(first, first + self.resolved_terms(tol)):
            values = values + self.amplitude(j) * np.cos(float(self.base) ** j * t_array)
        return float(values) if values.ndim == 0 else values

    def sample_periodic(self, count: int, tol: float = 1e-10) -> Tuple[np.ndarray, float]:
        """Sample at t_i = 2 pi i / count with exact integer phase reduction.

        Phases b^j i are reduced modulo ``count`` in integers, so large frequencies are
        sampled without rounding. Once b^j is divisible by ``count``, every later term is
        constant on the grid and the remaining sum is added in closed form.

        Returns:
            The samples and a bound on the omitted terms (0 when the sum closed exactly).
        """
        if count < 1:
            raise DomainError(f"Sample count must be positive, got {count}.")
        indices = np.arange(count, dtype=np.int64)
        values = np.zeros(count)
        first = int(self.start)
        limit = self.terms if self.terms else None
        budget = limit if limit is not None else max(self.terms_for_tol(tol), 1)
        j = first
        while True:
            if limit is not None and j >= first + limit:
                return values, self.tail_bound(limit)
            residue = pow(self.base, j, count)
            if residue == 0 and limit is None:
                values += self._closed_tail(j)
                return values, 0.0
            phases = (indices * residue) % count
            values += self.amplitude(j) * np.cos(2.0 * np.pi * phases / count)
            j += 1
            if limit is None and j >= first + budget:
                return values, self.tail_bound(j - first)

    def _closed_tail(self, j: int) -> float:
        """sum_{i >= j} A_i."""
        if self.law is AmplitudeLaw.HARDY:
            return self.scale * float(zeta(2.0, j))
        ratio = float(self.base) ** (-float(self.alpha))
        return self.scale * ratio**j / (1.0 - ratio)


@dataclass(frozen=True)
class LacunaryEvaluation:
    """Value of a lacunary series with a certified truncation bound."""

    value: Union[float, np.ndarray]
    tail_bound: float
    terms: int
    within_tolerance: bool


def lacunary_eval(s: LacunaryCosineSeries, t: Any, tol: float = 1e-10) -> LacunaryEvaluation:
    """Evaluate with a certified tail.

    The Weierstrass tail is b^(-J alpha)/(1 - b^(-alpha)) (shifted by the start index),
    the Hardy tail is the exact remainder of sum 1/j^2, which is below 1/J.

    Raises:
        DomainError: If tol <= 0.
    """
    if not tol > 0.0:
        raise DomainError(f"Tolerance must be positive, got {tol}.")
    terms = s.resolved_terms(tol)
    truncated = s.with_terms(terms)
    tail = s.tail_bound(terms)
    within = tail <= tol
    if not within:
        logger.warning(
            "Lacunary tail %.3g exceeds tolerance %.3g at the %d-term frequency cap.",
            tail,
            tol,
            terms,
        )
    return LacunaryEvaluation(truncated(t), tail, terms, within)


def holder_bound_constant(b: int, alpha: float) -> float:
    """Return C with |f(t+d) - f(t)| <= C |d|^alpha for |d| < 1, f the Weierstrass function.

    Splitting the series at b^N ~ 1/|d| bounds the low frequencies by
    |d|^alpha / (1 - b^(alpha-1)) and the high ones by 2|d|^alpha / (1 - b^-alpha).

    Raises:
        DomainError: If b < 2 or alpha is outside (0, 1).
    """
    if int(b) != b or b < 2:
        raise DomainError(f"The base must be an integer >= 2, got {b}.")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}.")
    return 1.0 / (1.0 - b ** (alpha - 1.0)) + 2.0 / (1.0 - b ** (-alpha))


@dataclass(frozen=True)
class HolderRatioReport:
    """Empirical sup of |f(t+d) - f(t)| / |d|^alpha against the proven constant."""

    max_ratio: float
    constant: float
    samples: int
    witness: Tuple[float, float]
    passed: bool


def holder_ratio_check(
    s: LacunaryCosineSeries, samples: int = 100_000, seed: int = 0
) -> HolderRatioReport:
    """Sample random (t, d) with |d| < 1 and compare the worst ratio with the constant.

    Offsets are log-uniform in [1e-6, 1) with a random sign, so every scale is probed.
    """
    if s.law is not AmplitudeLaw.WEIERSTRASS:
        raise DomainError("The Hölder constant is only proven for the Weierstrass law.")
    constant = abs(s.scale) * holder_bound_constant(s.base, float(s.alpha))
    rng = np.random.default_rng(seed)
    t = rng.uniform(0.0, 2.0 * np.pi, samples)
    delta = 10.0 ** rng.uniform(-6.0, 0.0, samples) * rng.choice([-1.0, 1.0], samples)
    f = s.with_terms(s.max_terms)
    ratios = np.abs(f(t + delta) - f(t)) / np.abs(delta) ** float(s.alpha)
    worst = int(np.argmax(ratios))
    max_ratio = float(ratios[worst])
    logger.debug("Hölder ratio %.6g against constant %.6g.", max_ratio, constant)
    return HolderRatioReport(
        max_ratio=max_ratio,
        constant=constant,
        samples=samples,
        witness=(float(t[worst]), float(delta[worst])),
        passed=max_ratio <= constant,
    )


def circle_points(t: Any, n: int) -> np.ndarray:
    """psi(t) = (cos t, sin t, 0, ..., 0) as an (m, n) array."""
    t_array = np.atleast_1d(np.asarray(t, dtype=float))
    points = np.zeros((t_array.size, n))
    points[:, 0] = np.cos(t_array)
    points[:, 1] = np.sin(t_array)
    return points


def circle_lift(u: BallSeries, t: Any):
    """Evaluate the boundary trace of ``u`` along the great circle psi(t)."""
    values = u.trace(circle_points(t, u.dim))
    return float(values[0]) if np.ndim(t) == 0 else values


def lift_as_lacunary(u: BallSeries) -> LacunaryCosineSeries:
    """The lacunary series equal to the circle lift of a highest-weight ball series.

    Q_k restricted to the circle is cos(kt), so the inverse-square law lifts to Hardy's
    series and the dyadic Hölder law to Weierstrass's, both with b=2 and start j=1.

    Raises:
        IncompatibleVariantError: For variants whose lift is not lacunary of this form.
    """
    terms = len(u.schedule.support(u.truncation))
    if terms == 0:
        raise DomainError("The circle lift needs at least one retained term.")
    factor = u.sign * u.scale
    if u.variant is SeriesVariant.NOT_C_BETA:
        return LacunaryCosineSeries(2, AmplitudeLaw.HARDY, terms=terms, start=1, scale=factor)
    if u.variant is SeriesVariant.ANYN_HOLDER:
        return LacunaryCosineSeries(
            2,
            AmplitudeLaw.WEIERSTRASS,
            alpha=u.schedule.alpha,
            terms=terms,
            start=1,
            scale=factor,
        )
    raise IncompatibleVariantError(f"The {u.variant} series has no lacunary circle lift.")
