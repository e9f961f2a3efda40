"""Coefficient schedules and truncated harmonic series on the unit ball.

A :class:`BallSeries` is ``sign * scale * sum_k a_k R_k(r) Y_k(theta)`` with ``R_k(r) = r^k``
inside the ball, or ``r^{2-n-k}`` after one Kelvin transform. Every evaluation comes with a
tail bound computed from the schedule's closed-form remainder.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import zeta

from rough_harmonics.exceptions import (
    DomainError,
    IncompatibleVariantError,
    KelvinTransformError,
    SupportError,
    UnsupportedDimensionError,
)
from rough_harmonics.harmonics import (
    HarmonicFunction,
    HarmonicKind,
    has_bounded_sup_norms,
    highest_weight_harmonic,
    random_unit_harmonic,
    sup_norm_bound,
    zonal_harmonic,
)
from rough_harmonics.helpers._enums import ValueEnum
from rough_harmonics.sphere import QuadratureRule, as_points

logger = logging.getLogger(__name__)

DEFAULT_OUTER_RADIUS = 2.0
SHARP_TAIL_RADIUS = 0.99
_RADIUS_SLACK = 1e-12
_MAX_BLOCK = 1000


class ScheduleVariant(ValueEnum):
    """Coefficient laws."""

    DYADIC_INVERSE_SQUARE = "dyadic_inverse_square"
    DYADIC_HOLDER = "dyadic_holder"
    HADAMARD = "hadamard"
    CUSTOM = "custom"


class SeriesVariant(ValueEnum):
    """Ball-series constructions, each pairing a schedule with a harmonic family."""

    NOT_HS = "notHs"
    NOT_C_BETA = "notCbeta"
    ANYN_HOLDER = "anyn_holder"
    HADAMARD_2D = "hadamard_2d"
    ZONAL = "zonal"
    CUSTOM = "custom"


class RadialKind(ValueEnum):
    """Radial profile of the terms: r^k inside, r^{2-n-k} after a Kelvin transform."""

    INTERIOR = "interior"
    KELVIN = "kelvin"


@dataclass(frozen=True)
class CoefficientSchedule:
    """A sparse coefficient sequence {a_k} times a positive scale.

    Attributes:
        variant: The coefficient law.
        scale: Positive multiplier applied to every coefficient.
        alpha: Exponent of the dyadic Hölder law.
        entries: ``(k, a_k)`` pairs of a custom schedule.
    """

    variant: ScheduleVariant
    scale: float = 1.0
    alpha: Optional[float] = None
    entries: Tuple[Tuple[int, float], ...] = ()

    def __post_init__(self) -> None:
        if not (self.scale > 0.0 and math.isfinite(self.scale)):
            raise DomainError(f"Schedule scale must be positive, got {self.scale}.")
        if self.variant is ScheduleVariant.DYADIC_HOLDER:
            if self.alpha is None or not self.alpha > 0.0:
                raise DomainError(f"The Hölder schedule needs alpha > 0, got {self.alpha}.")
        if self.variant is ScheduleVariant.CUSTOM:
            cleaned: Dict[int, float] = {}
            for k, a in self.entries:
                if int(k) != k or k < 0:
                    raise DomainError(f"Custom schedule degrees must be integers >= 0, got {k}.")
                if not math.isfinite(a):
                    raise DomainError(f"Custom coefficient a_{k} is not finite.")
                if int(k) in cleaned:
                    raise DomainError(f"Custom schedule repeats degree {k}.")
                cleaned[int(k)] = float(a)
            object.__setattr__(self, "entries", tuple(sorted(cleaned.items())))

    @property
    def first_block(self) -> int:
        """Smallest block index j of the support."""
        return 0 if self.variant is ScheduleVariant.HADAMARD else 1

    def support_degree(self, j: int) -> int:
        """Degree k carrying block j."""
        if self.variant is ScheduleVariant.HADAMARD:
            return 4**j
        return 2**j

    def block_index(self, k: int) -> Optional[int]:
        """Block index j with ``support_degree(j) == k``, or None off the support."""
        if self.variant is ScheduleVariant.CUSTOM or k < 1 or k & (k - 1):
            return None
        exponent = k.bit_length() - 1
        if self.variant is ScheduleVariant.HADAMARD:
            return exponent // 2 if exponent % 2 == 0 else None
        return exponent if exponent >= 1 else None

    def last_block(self, k_max: int) -> int:
        """Largest block index whose degree is at most ``k_max``."""
        if k_max < 1:
            return self.first_block - 1
        exponent = int(k_max).bit_length() - 1
        if self.variant is ScheduleVariant.HADAMARD:
            return exponent // 2
        return exponent

    def base_coefficient(self, k: int) -> float:
        """Unscaled a_k."""
        if self.variant is ScheduleVariant.CUSTOM:
            return dict(self.entries).get(int(k), 0.0)
        j = self.block_index(int(k))
        if j is None:
            return 0.0
        if self.variant is ScheduleVariant.DYADIC_INVERSE_SQUARE:
            return 1.0 / (j * j)
        if self.variant is ScheduleVariant.DYADIC_HOLDER:
            return 2.0 ** (-j * float(self.alpha))
        return 2.0**-j

    def coefficient(self, k: int) -> float:
        """Scaled a_k; zero off the support."""
        return self.scale * self.base_coefficient(k)

    def iter_support(self, after: int = -1) -> Iterator[int]:
        """Yield support degrees greater than ``after`` in increasing order."""
        if self.variant is ScheduleVariant.CUSTOM:
            for k, a in self.entries:
                if k > after and a != 0.0:
                    yield k
            return
        j = max(self.first_block, self.last_block(after) + 1)
        while j <= _MAX_BLOCK:
            yield self.support_degree(j)
            j += 1

    def support(self, k_max: int) -> List[int]:
        """Support degrees up to ``k_max``."""
        degrees = []
        for k in self.iter_support():
            if k > k_max:
                break
            degrees.append(k)
        return degrees

    def tail_sum(self, k_max: int, power: float = 1.0) -> float:
        """Closed form of sum_{k > k_max} |a_k|^power, scale included.

        Raises:
            DomainError: If the remainder diverges for this power.
        """
        scale = self.scale**power
        if self.variant is ScheduleVariant.CUSTOM:
            return scale * math.fsum(
                abs(a) ** power for k, a in self.entries if k > k_max
            )
        start = max(self.first_block, self.last_block(k_max) + 1)
        if self.variant is ScheduleVariant.DYADIC_INVERSE_SQUARE:
            if 2.0 * power <= 1.0:
                raise DomainError(f"sum j^(-{2 * power}) diverges.")
            return scale * float(zeta(2.0 * power, start))
        if self.variant is ScheduleVariant.DYADIC_HOLDER:
            ratio = 2.0 ** (-float(self.alpha) * power)
        else:
            ratio = 2.0**-power
        return scale * ratio**start / (1.0 - ratio)

    def total(self, power: float = 1.0) -> float:
        """sum_k |a_k|^power over the whole support."""
        return self.tail_sum(-1, power)

    def block_weight(self, k: int) -> float:
        """Sub-geometric part of a_k^2: j^-4 for the inverse-square law, else 1."""
        if self.variant is ScheduleVariant.DYADIC_INVERSE_SQUARE:
            j = self.block_index(k) or 1
            return float(j) ** -4
        return 1.0

    @property
    def summable_block_weight(self) -> bool:
        """Whether the block weights themselves form a convergent series."""
        return self.variant in (
            ScheduleVariant.DYADIC_INVERSE_SQUARE,
            ScheduleVariant.CUSTOM,
        )

    def block_weight_tail(self, k_max: int) -> float:
        """sum of block weights beyond ``k_max`` (finite only when summable)."""
        if self.variant is ScheduleVariant.DYADIC_INVERSE_SQUARE:
            return float(zeta(4.0, max(1, self.last_block(k_max) + 1)))
        if self.variant is ScheduleVariant.CUSTOM:
            return 0.0
        return math.inf

    def with_scale(self, scale: float) -> "CoefficientSchedule":
        """Return the same law with another scale."""
        return replace(self, scale=scale)

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready description."""
        data: Dict[str, Any] = {"variant": str(self.variant), "scale": self.scale}
        if self.alpha is not None:
            data["alpha"] = self.alpha
        if self.variant is ScheduleVariant.CUSTOM:
            data["entries"] = [{"k": k, "a": a} for k, a in self.entries]
        return data


def schedule_coefficient(schedule: CoefficientSchedule, k: int) -> float:
    """Return a_k of the schedule times its scale.

    Raises:
        DomainError: If k < 0.
    """
    if k < 0:
        raise DomainError(f"Degree must be nonnegative, got {k}.")
    return schedule.coefficient(k)


_VARIANT_SCHEDULES = {
    SeriesVariant.NOT_HS: ScheduleVariant.DYADIC_INVERSE_SQUARE,
    SeriesVariant.NOT_C_BETA: ScheduleVariant.DYADIC_INVERSE_SQUARE,
    SeriesVariant.ZONAL: ScheduleVariant.DYADIC_INVERSE_SQUARE,
    SeriesVariant.ANYN_HOLDER: ScheduleVariant.DYADIC_HOLDER,
    SeriesVariant.HADAMARD_2D: ScheduleVariant.HADAMARD,
    SeriesVariant.CUSTOM: ScheduleVariant.CUSTOM,
}

_VARIANT_KINDS = {
    SeriesVariant.NOT_HS: HarmonicKind.RANDOM,
    SeriesVariant.NOT_C_BETA: HarmonicKind.HIGHEST_WEIGHT,
    SeriesVariant.ANYN_HOLDER: HarmonicKind.HIGHEST_WEIGHT,
    SeriesVariant.HADAMARD_2D: HarmonicKind.HIGHEST_WEIGHT,
    SeriesVariant.ZONAL: HarmonicKind.ZONAL,
}


@dataclass(frozen=True)
class SeriesTerm:
    """One retained term a_k R_k(r) Y_k(theta) (coefficient unscaled)."""

    degree: int
    coefficient: float
    harmonic: HarmonicFunction
    sup_bound: float


@dataclass(frozen=True)
class SeriesEvaluation:
    """Value of a truncated series with a certified bound on the omitted terms."""

    value: Union[float, np.ndarray]
    tail_bound: float
    within_tolerance: bool


@dataclass(frozen=True, eq=False)
class BallSeries:
    """A truncated harmonic series on the ball, or its Kelvin transform on [1, R_out].

    Attributes:
        dim: Ambient dimension n.
        variant: The construction that produced the series.
        schedule: Coefficient law, including the scale.
        truncation: K_max; terms with k > K_max are omitted and covered by tail bounds.
        terms: Retained nonzero terms in increasing degree.
        kind: Harmonic family paired with the schedule.
        radial: Interior or Kelvin profile.
        sign: Overall sign (the outer solutions use -1).
        seed: Seed of the random harmonics, if any.
        outer_radius: Outer end of the validity range of Kelvin series.
    """

    dim: int
    variant: SeriesVariant
    schedule: CoefficientSchedule
    truncation: int
    terms: Tuple[SeriesTerm, ...] = field(repr=False)
    kind: HarmonicKind
    radial: RadialKind = RadialKind.INTERIOR
    sign: float = 1.0
    seed: Optional[int] = None
    outer_radius: float = DEFAULT_OUTER_RADIUS

    @property
    def scale(self) -> float:
        """Schedule scale rho."""
        return self.schedule.scale

    @property
    def factor(self) -> float:
        """sign * scale, applied after summation."""
        return self.sign * self.schedule.scale

    @property
    def degrees(self) -> List[int]:
        """Degrees of the retained terms."""
        return [term.degree for term in self.terms]

    @property
    def max_degree(self) -> int:
        """Largest retained degree K_eff (0 for an empty series)."""
        return max(self.degrees, default=0)

    @property
    def radial_range(self) -> Tuple[float, float]:
        """Closed radial interval on which the series is defined."""
        if self.radial is RadialKind.INTERIOR:
            return 0.0, 1.0
        return 1.0, self.outer_radius

    def radial_exponent(self, k: int) -> int:
        """Exponent of r in term k."""
        if self.radial is RadialKind.INTERIOR:
            return k
        return 2 - self.dim - k

    def radial_factors(self, r: float) -> np.ndarray:
        """a_k R_k(r) for every retained term, scale and sign included."""
        return self.factor * np.array(
            [
                term.coefficient * r ** float(self.radial_exponent(term.degree))
                for term in self.terms
            ]
        )

    def radial_derivative_factors(self, r: float) -> np.ndarray:
        """a_k R_k'(r) for every retained term, scale and sign included."""
        factors = []
        for term in self.terms:
            e = self.radial_exponent(term.degree)
            factors.append(0.0 if e == 0 else term.coefficient * e * r ** float(e - 1))
        return self.factor * np.array(factors)

    def angular_matrix(self, directions: np.ndarray) -> np.ndarray:
        """Y_k at unit directions, one row per retained term."""
        directions, _ = as_points(directions, self.dim)
        if not self.terms:
            return np.zeros((0, directions.shape[0]))
        return np.vstack([term.harmonic(directions) for term in self.terms])

    def _check_radii(self, radii: np.ndarray) -> None:
        lo, hi = self.radial_range
        if np.any(radii < lo - _RADIUS_SLACK) or np.any(radii > hi + _RADIUS_SLACK):
            raise DomainError(
                f"Points with radius in [{radii.min():.6g}, {radii.max():.6g}] lie outside "
                f"the {self.radial} validity range [{lo}, {hi}]."
            )

    def evaluate(self, x: Any):
        """Evaluate the truncation at one point or an (m, n) array of points."""
        points, single = as_points(x, self.dim)
        radii = np.linalg.norm(points, axis=1)
        self._check_radii(radii)
        values = np.zeros(points.shape[0])
        if self.radial is RadialKind.INTERIOR:
            for term in self.terms:
                values += term.coefficient * term.harmonic.homogeneous(points)
        else:
            directions = points / radii[:, None]
            for term in self.terms:
                exponent = float(self.radial_exponent(term.degree))
                values += term.coefficient * radii**exponent * term.harmonic(directions)
        values = self.factor * values
        return float(values[0]) if single else values

    __call__ = evaluate

    def trace(self, theta: Any):
        """Boundary values on S^{n-1} (r = 1, where both radial profiles equal 1)."""
        points, single = as_points(theta, self.dim)
        values = self.factor * (
            np.array([t.coefficient for t in self.terms]) @ self.angular_matrix(points)
            if self.terms
            else np.zeros(points.shape[0])
        )
        return float(values[0]) if single else values

    def radial_derivative(self, x: Any):
        """d/dr of the truncation at points off the origin."""
        points, single = as_points(x, self.dim)
        radii = np.linalg.norm(points, axis=1)
        self._check_radii(radii)
        if np.any(radii == 0.0):
            raise DomainError("The radial derivative is undefined at the origin.")
        directions = points / radii[:, None]
        values = np.zeros(points.shape[0])
        for term in self.terms:
            e = self.radial_exponent(term.degree)
            if e:
                values += term.coefficient * e * radii ** float(e - 1) * term.harmonic(directions)
        values = self.factor * values
        return float(values[0]) if single else values

    def gradient(self, x: Any) -> np.ndarray:
        """Gradient of the truncation (planar and highest-weight harmonics).

        Raises:
            UnsupportedDimensionError: If the harmonic family has no closed-form gradient.
        """
        if not (self.kind is HarmonicKind.HIGHEST_WEIGHT or self.dim == 2):
            raise UnsupportedDimensionError(
                "Series gradients need planar or highest-weight harmonics."
            )
        points, single = as_points(x, self.dim)
        radii = np.linalg.norm(points, axis=1)
        self._check_radii(radii)
        result = np.zeros_like(points)
        for term in self.terms:
            inner_gradient = term.harmonic.gradient(points)
            if self.radial is RadialKind.INTERIOR:
                result += term.coefficient * inner_gradient
                continue
            # u* = r^{2-n-2k} P(x) for the homogeneous polynomial P of degree k.
            power = float(2 - self.dim - 2 * term.degree)
            polynomial = term.harmonic.homogeneous(points)
            result += term.coefficient * (
                power * radii[:, None] ** (power - 2.0) * points * polynomial[:, None]
                + radii[:, None] ** power * inner_gradient
            )
        result = self.factor * result
        return result[0] if single else result

    def tail_weight(self, k: int) -> float:
        """Sup-norm bound of the harmonic paired with degree k."""
        return sup_norm_bound(self.dim, k, self.kind)

    @property
    def bounded_weights(self) -> bool:
        """Whether tail sup-norm weights stay bounded in k."""
        return has_bounded_sup_norms(self.dim, self.kind)

    def _contraction(self, r: float) -> float:
        if self.radial is RadialKind.INTERIOR:
            return r
        return 1.0 / r if r > 0.0 else math.inf

    def tail_bound(self, r: float = 1.0) -> float:
        """Certified bound on |sum of omitted terms| at radius r (sup over the sphere).

        Bounded harmonic families use the closed-form remainder of the schedule times the
        uniform sup bound, since |R_k(r)| <= 1 on the validity range. When the radial
        factor contracts by at least 0.99, the remainder is also summed term by term with
        the factor included and the smaller bound is kept.

        Returns:
            The bound, or inf when no finite certificate exists at this radius.
        """
        bounds = [math.inf]
        schedule = self.schedule
        if schedule.variant is ScheduleVariant.CUSTOM:
            return abs(self.sign) * self._custom_tail()
        if self.bounded_weights:
            weight = max(self.tail_weight(1), self.tail_weight(0))
            bounds.append(abs(self.sign) * weight * schedule.tail_sum(self.truncation))
        q = self._contraction(r)
        if q <= SHARP_TAIL_RADIUS:
            bounds.append(abs(self.factor) * self._sharp_tail(q))
        return min(bounds)

    def _sharp_tail(self, q: float) -> float:
        """sum_{k > K} |a_k| sup|Y_k| q^{e_k} by direct summation with a geometric cap."""
        if q == 0.0:
            return 0.0
        log_q = math.log(q)
        offset = 0 if self.radial is RadialKind.INTERIOR else self.dim - 2
        total = 0.0
        previous = None
        for k in self.schedule.iter_support(self.truncation):
            a = self.schedule.base_coefficient(k)
            if a == 0.0:
                continue
            log_term = (
                math.log(abs(a)) + math.log(self.tail_weight(k)) + (k + offset) * log_q
            )
            term = math.exp(log_term) if log_term > -745.0 else 0.0
            if term == 0.0:
                break
            total += term
            if previous is not None and term <= 0.5 * previous and term <= 1e-17 * total:
                # Ratios of later terms keep shrinking, so the rest is at most one more term.
                total += term
                break
            previous = term
        else:
            if self.schedule.variant is not ScheduleVariant.CUSTOM:
                return math.inf
        return total

    @property
    def certificate(self) -> float:
        """Normal-convergence certificate sum_k |a_k| sup|Y_k| (inf if not summable)."""
        return self.truncated_certificate + self.tail_bound(1.0)

    def _custom_tail(self) -> float:
        return self.schedule.scale * math.fsum(
            abs(a) * self.tail_weight(k)
            for k, a in self.schedule.entries
            if k > self.truncation
        )

    @property
    def truncated_certificate(self) -> float:
        """sum over retained terms of |a_k| sup|Y_k|, which bounds the truncation."""
        return abs(self.factor) * math.fsum(abs(t.coefficient) * t.sup_bound for t in self.terms)

    def kelvin_transform(self) -> "BallSeries":
        """Return u*, the term-wise Kelvin transform r^k -> r^{2-n-k}, valid on [1, R_out].

        Raises:
            KelvinTransformError: If the series is already a Kelvin transform.
        """
        if self.radial is RadialKind.KELVIN:
            raise KelvinTransformError("Only one Kelvin layer is supported.")
        return replace(self, radial=RadialKind.KELVIN)

    def negated(self) -> "BallSeries":
        """Return -u."""
        return replace(self, sign=-self.sign)

    def scaled(self, scale: float) -> "BallSeries":
        """Return the same series with the schedule scale replaced."""
        return replace(self, schedule=self.schedule.with_scale(scale))

    def truncated(self, k_max: int) -> "BallSeries":
        """Return the series truncated at a smaller K_max."""
        if k_max > self.truncation:
            raise DomainError("Truncation can only be lowered; rebuild to raise it.")
        return replace(
            self,
            truncation=k_max,
            terms=tuple(t for t in self.terms if t.degree <= k_max),
        )

    def to_dict(self) -> Dict[str, Any]:
        """JSON document; harmonics are described by variant and seed, never numerically."""
        data: Dict[str, Any] = {
            "dim": self.dim,
            "variant": str(self.variant),
            "scale": self.scale,
            "K": self.truncation,
            "terms": [{"k": t.degree, "a": t.coefficient} for t in self.terms],
            "radial": str(self.radial),
        }
        if self.seed is not None:
            data["seed"] = self.seed
        if self.schedule.alpha is not None:
            data["alpha"] = self.schedule.alpha
        if self.sign < 0:
            data["sign"] = -1
        if self.variant is SeriesVariant.CUSTOM:
            data["harmonic"] = str(self.kind)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BallSeries":
        """Rebuild a series from :meth:`to_dict` output."""
        variant = SeriesVariant(data["variant"])
        terms = data.get("terms", [])
        k_max = int(data.get("K", max((int(t["k"]) for t in terms), default=0)))
        series = build_series(
            variant,
            int(data["dim"]),
            k_max,
            scale=float(data.get("scale", 1.0)),
            seed=data.get("seed"),
            alpha=data.get("alpha"),
            custom_terms=[(int(t["k"]), float(t["a"])) for t in terms]
            if variant is SeriesVariant.CUSTOM
            else None,
            harmonic_kind=HarmonicKind(data["harmonic"]) if "harmonic" in data else None,
        )
        if data.get("radial", "interior") == str(RadialKind.KELVIN):
            series = series.kelvin_transform()
        if data.get("sign", 1) < 0:
            series = series.negated()
        return series


def _make_harmonic(
    kind: HarmonicKind, n: int, k: int, seed: Optional[int]
) -> HarmonicFunction:
    if kind is HarmonicKind.RANDOM:
        return random_unit_harmonic(n, k, seed)
    if kind is HarmonicKind.ZONAL:
        return zonal_harmonic(n, k)
    if kind is HarmonicKind.HIGHEST_WEIGHT:
        return highest_weight_harmonic(n, k)
    raise DomainError(f"Series cannot be built from '{kind}' harmonics.")


def build_series(
    variant: Union[SeriesVariant, str],
    n: int,
    k_max: int,
    scale: float = 1.0,
    seed: Optional[int] = None,
    alpha: Optional[float] = None,
    custom_terms: Optional[Sequence[Tuple[int, float]]] = None,
    harmonic_kind: Optional[HarmonicKind] = None,
) -> BallSeries:
    """Build one of the ball-series constructions, truncated at ``k_max``.

    Args:
        variant: ``notHs`` (inverse-square law with random harmonics), ``notCbeta``
            (inverse-square law with Q_k), ``anyn_holder`` (Hölder law with Q_k),
            ``hadamard_2d`` (a_{4^j} = 2^-j with cos kt), ``zonal`` (inverse-square law
            with zonal harmonics about e_1) or ``custom``.
        n: Ambient dimension.
        k_max: Largest retained degree.
        scale: Positive multiplier rho.
        seed: Seed for random harmonics.
        alpha: Exponent for ``anyn_holder``.
        custom_terms: ``(k, a_k)`` pairs for ``custom``.
        harmonic_kind: Harmonic family for ``custom`` (default highest weight).

    Returns:
        The truncated series.

    Raises:
        IncompatibleVariantError: On a variant/dimension mismatch.
        DomainError: On invalid parameters.
    """
    variant = SeriesVariant(variant)
    if n < 2:
        raise DomainError(f"Ball dimension must be at least 2, got {n}.")
    if k_max < 0:
        raise DomainError(f"K_max must be nonnegative, got {k_max}.")
    if variant is SeriesVariant.HADAMARD_2D and n != 2:
        raise IncompatibleVariantError(f"hadamard_2d lives on the disk, got n={n}.")
    if variant is SeriesVariant.NOT_HS and n not in (2, 3):
        raise IncompatibleVariantError(f"notHs needs random harmonics, n in {{2, 3}}; got {n}.")
    if variant is SeriesVariant.ANYN_HOLDER and alpha is None:
        raise DomainError("anyn_holder needs an exponent alpha.")

    schedule_variant = _VARIANT_SCHEDULES[variant]
    schedule = CoefficientSchedule(
        schedule_variant,
        scale=scale,
        alpha=alpha if schedule_variant is ScheduleVariant.DYADIC_HOLDER else None,
        entries=tuple(custom_terms or ()),
    )
    kind = harmonic_kind or _VARIANT_KINDS.get(variant, HarmonicKind.HIGHEST_WEIGHT)
    if kind is HarmonicKind.RANDOM:
        if n not in (2, 3):
            raise IncompatibleVariantError(f"Random harmonics need n in {{2, 3}}, got {n}.")
        if seed is None:
            seed = int(np.random.SeedSequence().entropy % 2**32)
            logger.info("No seed given for %s; drew seed %d.", variant, seed)

    terms = []
    for k in schedule.support(k_max):
        a = schedule.base_coefficient(k)
        if a == 0.0:
            continue
        harmonic = _make_harmonic(kind, n, k, seed)
        terms.append(SeriesTerm(k, a, harmonic, harmonic.sup_norm_bound))

    series = BallSeries(
        dim=n,
        variant=variant,
        schedule=schedule,
        truncation=int(k_max),
        terms=tuple(terms),
        kind=kind,
        seed=seed if kind is HarmonicKind.RANDOM else None,
    )
    logger.debug("Built %s series, n=%d, K=%d, %d terms.", variant, n, k_max, len(terms))
    if math.isinf(series.certificate):
        logger.warning(
            "The %s series in dimension %d has no finite normal-convergence certificate; "
            "tail bounds are only finite for r <= %s.",
            variant,
            n,
            SHARP_TAIL_RADIUS,
        )
    return series


def eval_ball_series(u: BallSeries, x: Any, tol: float = 1e-6) -> SeriesEvaluation:
    """Evaluate a truncated series with a certified tail bound.

    The tail bound is taken at the worst radius among the given points.

    Raises:
        DomainError: If tol <= 0 or a point lies outside the radial range.
    """
    if not tol > 0.0:
        raise DomainError(f"Tolerance must be positive, got {tol}.")
    points, single = as_points(x, u.dim)
    value = u.evaluate(points)
    radii = np.linalg.norm(points, axis=1)
    worst = float(radii.max() if u.radial is RadialKind.INTERIOR else radii.min())
    tail = u.tail_bound(worst)
    within = tail <= tol
    if not within:
        logger.warning("Tail bound %.3g exceeds the tolerance %.3g.", tail, tol)
    return SeriesEvaluation(float(value[0]) if single else value, tail, within)


def kelvin_transform(u: BallSeries) -> BallSeries:
    """Return the term-wise Kelvin transform of an interior series (without sign)."""
    return u.kelvin_transform()


@dataclass(frozen=True)
class HarmonicityReport:
    """Finite-difference Laplacian residuals relative to a second-derivative scale."""

    max_residual: float
    residuals: np.ndarray = field(repr=False)
    scale: float
    step: float
    flagged: bool


def _derivative_scale(u: BallSeries) -> float:
    return abs(u.factor) * math.fsum(
        abs(t.coefficient) * t.sup_bound * max(1, t.degree) ** 2 for t in u.terms
    )


def check_harmonic_fd(
    u: Union[BallSeries, Callable[[np.ndarray], np.ndarray]],
    sample_points: Any,
    h: float = 1e-3,
    scale: Optional[float] = None,
    threshold: float = 1e-4,
    region: Optional[Tuple[float, float]] = None,
) -> HarmonicityReport:
    """Apply the (2n+1)-point Laplacian stencil and report relative residuals.

    Args:
        u: A series, or a vectorized function of (m, n) points.
        sample_points: Points of shape (m, n).
        h: Stencil step.
        scale: Residual normalization; defaults to sum |a_k| sup|Y_k| k^2 for series and
            to 1 for functions.
        threshold: Residuals above it are flagged.
        region: Radial validity range for plain functions (series know their own).

    Returns:
        The residual report.

    Raises:
        DomainError: If a point is closer than 2h to the radial boundary.
    """
    points, _ = as_points(sample_points)
    n = points.shape[1]
    if isinstance(u, BallSeries):
        region = u.radial_range
        evaluate = u.evaluate
        if scale is None:
            scale = _derivative_scale(u)
    else:
        evaluate = u
    if region is not None:
        radii = np.linalg.norm(points, axis=1)
        lo, hi = region
        inner_ok = lo == 0.0 or np.all(radii >= lo + 2 * h)
        if not inner_ok or np.any(radii > hi - 2 * h):
            raise DomainError(f"Stencil points must stay {2 * h} away from the boundary.")
    if not scale:
        scale = 1.0

    center = np.asarray(evaluate(points), dtype=float)
    laplacian = np.zeros_like(center)
    for axis in range(n):
        shift = np.zeros(n)
        shift[axis] = h
        laplacian += (
            np.asarray(evaluate(points + shift))
            + np.asarray(evaluate(points - shift))
            - 2.0 * center
        )
    residuals = np.abs(laplacian / (h * h)) / scale
    max_residual = float(residuals.max()) if residuals.size else 0.0
    return HarmonicityReport(max_residual, residuals, float(scale), h, max_residual > threshold)


def mean_value_check(
    u: Union[BallSeries, Callable[[np.ndarray], np.ndarray]],
    center: Sequence[float],
    radius: float,
    rule: QuadratureRule,
    region: Optional[Tuple[float, float]] = None,
) -> float:
    """Return |average of u over the sphere of given center and radius - u(center)|.

    Raises:
        SupportError: If the ball is not contained in the validity region.
    """
    center_array = np.asarray(center, dtype=float)
    if isinstance(u, BallSeries):
        region = u.radial_range
        evaluate = u.evaluate
    else:
        evaluate = u
    if not radius > 0.0:
        raise DomainError(f"Radius must be positive, got {radius}.")
    if region is not None:
        lo, hi = region
        distance = float(np.linalg.norm(center_array))
        if distance + radius > hi + _RADIUS_SLACK or (lo > 0.0 and distance - radius < lo):
            raise SupportError(
                f"Ball of radius {radius} around |c|={distance:.6g} leaves [{lo}, {hi}]."
            )
    values = np.asarray(evaluate(center_array + radius * rule.nodes), dtype=float)
    average = float(rule.integrate(values)) / rule.measure
    return abs(average - float(np.asarray(evaluate(center_array[None, :]))[0]))
