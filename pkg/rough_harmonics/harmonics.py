"""Spherical harmonics: dimension counts, eigenvalues, explicit families and bases.

Every planar harmonic of degree k >= 1 (and every highest-weight harmonic in any
dimension) is stored through a complex weight ``w`` with ``r^k Y(theta) = Re(w z^k)``,
``z = x_1 + i x_2``. Values and gradients of the homogeneous extension then come from one
complex power. Bases and random harmonics on S^2 use fully normalized associated Legendre
functions.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Optional, Tuple

import numpy as np
from memoization import cached
from scipy.special import gammaln

from rough_harmonics.exceptions import (
    DomainError,
    HarmonicOverflowError,
    UnsupportedDimensionError,
)
from rough_harmonics.helpers._enums import ValueEnum
from rough_harmonics.sphere import (
    SpherePoint,
    as_points,
    random_sphere_points,
    sphere_surface_area,
)

logger = logging.getLogger(__name__)

MAX_GEGENBAUER_DEGREE = 2**14
_INT64_MAX = 2**63 - 1
_TABLE_BUDGET = 2**22  # floats per Legendre table chunk
_RESCALE_BITS = 256  # renormalize Legendre mantissas outside 2^-256..2^256
_SQRT_PI = math.sqrt(math.pi)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


class HarmonicKind(ValueEnum):
    """Families of spherical harmonics."""

    #: Re(theta_1 + i theta_2)^k.
    HIGHEST_WEIGHT = "highest_weight"

    #: L2-normalized Gegenbauer polynomial of <pole, theta>.
    ZONAL = "zonal"

    #: Element of the real orthonormal basis (n in {2, 3}).
    BASIS_ELEMENT = "basis_element"

    #: Uniform draw from the unit sphere of H_k (n in {2, 3}).
    RANDOM = "random"


def harmonic_dimension(n: int, k: int) -> int:
    """Return d_k, the dimension of the degree-k spherical harmonics on S^{n-1}.

    Computed exactly as C(k+n-1, n-1) - C(k+n-3, n-1), which equals
    (2k+n-2)(k+n-3)! / (k!(n-2)!).

    Raises:
        DomainError: If n < 2 or k < 0.
        HarmonicOverflowError: If d_k does not fit in a signed 64-bit integer.
    """
    if n < 2:
        raise DomainError(f"Sphere dimension must be at least 2, got {n}.")
    if k < 0:
        raise DomainError(f"Harmonic degree must be nonnegative, got {k}.")
    if k == 0:
        return 1
    if n == 2:
        return 2
    value = math.comb(k + n - 1, n - 1) - math.comb(k + n - 3, n - 1)
    if value > _INT64_MAX:
        raise HarmonicOverflowError(f"d_k for n={n}, k={k} exceeds 64-bit range.")
    return value


def laplace_beltrami_eigenvalue(n: int, k: int) -> float:
    """Return mu_k = k(k+n-2), the eigenvalue of -Laplace-Beltrami on H_k."""
    return float(k * (k + n - 2))


def log_eigenvalue(n: int, k: int) -> float:
    """Return log mu_k without forming the (possibly huge) product."""
    if k == 0:
        return -math.inf
    return math.log(k) + math.log(k + n - 2)


def _log_gamma_ratio(k: float, a: float, b: float) -> float:
    """log Gamma(k+a) - log Gamma(k+b), with an asymptotic form for huge k."""
    if k < 1e12:
        return float(gammaln(k + a) - gammaln(k + b))
    return (a - b) * math.log(k) + (a - b) * (a + b - 1.0) / (2.0 * k)


def _complex_power(points: np.ndarray, k: int) -> Tuple[np.ndarray, np.ndarray]:
    """Return modulus and argument of (x_1 + i x_2)^k."""
    rho = np.hypot(points[:, 0], points[:, 1])
    if k == 0:
        return np.ones_like(rho), np.zeros_like(rho)
    with np.errstate(under="ignore"):
        modulus = np.power(rho, float(k))
    return modulus, float(k) * np.arctan2(points[:, 1], points[:, 0])


def _re_weighted_power(points: np.ndarray, k: int, weight: complex) -> np.ndarray:
    modulus, phase = _complex_power(points, k)
    return modulus * (weight.real * np.cos(phase) - weight.imag * np.sin(phase))


def highest_weight_eval(n: int, k: int, theta: Any):
    """Evaluate Q_k(theta) = Re(theta_1 + i theta_2)^k.

    Args:
        n: Ambient dimension.
        k: Degree, at least 0.
        theta: A SpherePoint, a coordinate vector, or an (m, n) array of points.

    Returns:
        A float for a single point, else an array of values.

    Raises:
        DomainError: If k < 0.
    """
    if k < 0:
        raise DomainError(f"Harmonic degree must be nonnegative, got {k}.")
    points, single = as_points(theta, n)
    values = _re_weighted_power(points, k, 1.0 + 0.0j)
    return float(values[0]) if single else values


def highest_weight_l2_norm(n: int, k: int) -> float:
    """Return ||Q_k||_2 = sqrt(pi^{n/2} k! / Gamma(k + n/2)).

    The closed form is exposed for k >= 1 only: at k = 0 it gives pi^{n/2}/Gamma(n/2),
    which is half the measured value |S^{n-1}|.

    Raises:
        DomainError: If k < 1 or n < 2.
    """
    if n < 2:
        raise DomainError(f"Sphere dimension must be at least 2, got {n}.")
    if k < 1:
        raise DomainError("The closed-form norm of Q_k is only valid for k >= 1.")
    log_square = 0.5 * n * math.log(math.pi) + _log_gamma_ratio(float(k), 1.0, 0.5 * n)
    return math.exp(0.5 * log_square)


def gegenbauer(k: int, lam: float, x: np.ndarray) -> np.ndarray:
    """Evaluate C_k^lam(x) with the three-term recurrence.

    Raises:
        HarmonicOverflowError: If k exceeds 2^14 or the recurrence overflows.
    """
    if k > MAX_GEGENBAUER_DEGREE:
        raise HarmonicOverflowError(
            f"Gegenbauer degree {k} exceeds the supported maximum "
            f"{MAX_GEGENBAUER_DEGREE}."
        )
    x = np.asarray(x, dtype=float)
    previous = np.ones_like(x)
    if k == 0:
        return previous
    current = 2.0 * lam * x
    for j in range(2, k + 1):
        previous, current = current, (
            2.0 * (j + lam - 1.0) * x * current - (j + 2.0 * lam - 2.0) * previous
        ) / j
    if not np.all(np.isfinite(current)):
        raise HarmonicOverflowError(f"Gegenbauer recurrence overflowed at k={k}.")
    return current


@cached(max_size=1024)
def _zonal_log_norm(n: int, k: int) -> float:
    """log of the L2(S^{n-1}) norm of C_k^lam(<pole, .>), lam = (n-2)/2."""
    lam = 0.5 * (n - 2)
    log_square = (
        math.log(sphere_surface_area(n - 1))
        + math.log(math.pi)
        + (1.0 - 2.0 * lam) * math.log(2.0)
        + _log_gamma_ratio(float(k), 2.0 * lam, 1.0)
        - math.log(k + lam)
        - 2.0 * float(gammaln(lam))
    )
    return 0.5 * log_square


def iter_legendre_tables(k: int, x: np.ndarray) -> Iterator[Tuple[int, np.ndarray]]:
    """Yield ``(l, table)`` for l = 0..k, table[m] = normalized P_l^m(x), m = 0..l.

    Normalization: the integral of table[m]^2 over [-1, 1] is 1.

    Each order m is carried as a mantissa times ``2**exponent[m]`` per point. Sectoral
    values sin^l(theta) leave the double range long before the column recursion brings
    P_l^m back to order one, so the seeds must keep their exponent.
    """
    x = np.asarray(x, dtype=float)
    sine = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    previous = np.empty((0, x.size))
    current = np.full((1, x.size), 1.0 / math.sqrt(2.0))
    exponent = np.zeros((1, x.size), dtype=np.intc)
    yield 0, current.copy()
    for degree in range(1, k + 1):
        table = np.empty((degree + 1, x.size))
        if degree >= 2:
            orders = np.arange(degree - 1, dtype=float)
            a = np.sqrt((4.0 * degree**2 - 1.0) / (degree**2 - orders**2))
            b = np.sqrt(((degree - 1.0) ** 2 - orders**2) / (4.0 * (degree - 1.0) ** 2 - 1.0))
            table[: degree - 1] = a[:, None] * (
                x * current[: degree - 1] - b[:, None] * previous[: degree - 1]
            )
        table[degree - 1] = math.sqrt(2.0 * degree + 1.0) * x * current[degree - 1]
        table[degree] = (
            math.sqrt((2.0 * degree + 1.0) / (2.0 * degree)) * sine * current[degree - 1]
        )
        exponent = np.vstack([exponent, exponent[degree - 1 : degree]])

        # Rows m < degree share one exponent between the two terms of the recursion.
        magnitude = np.abs(table)
        magnitude[:degree] = np.maximum(magnitude[:degree], np.abs(current))
        _, shift = np.frexp(magnitude)
        shift = np.where(np.abs(shift) > _RESCALE_BITS, shift, 0).astype(np.intc)
        if shift.any():
            table = np.ldexp(table, -shift)
            current = np.ldexp(current, -shift[:degree])
            exponent = exponent + shift

        previous, current = current, table
        with np.errstate(under="ignore"):
            yield degree, np.ldexp(current, exponent)


def legendre_table(k: int, x: np.ndarray) -> np.ndarray:
    """Return the normalized associated Legendre values of degree k, shape (k+1, m)."""
    table = None
    for _, table in iter_legendre_tables(k, x):
        pass
    return table


def _check_basis_dimension(n: int) -> None:
    if n not in (2, 3):
        raise UnsupportedDimensionError(
            f"Orthonormal bases are implemented for n in {{2, 3}}, got n={n}."
        )


def basis_values(n: int, k: int, points: np.ndarray) -> np.ndarray:
    """Evaluate every element of the real orthonormal basis of H_k at unit points.

    Ordering for n=3: row 0 is the m=0 element, rows 2m-1 and 2m are the cosine and sine
    elements of order m. For n=2: cos(kt)/sqrt(pi) then sin(kt)/sqrt(pi).

    Returns:
        An array of shape (d_k, m).
    """
    _check_basis_dimension(n)
    points, _ = as_points(points, n)
    azimuth = np.arctan2(points[:, 1], points[:, 0])
    if k == 0:
        area = sphere_surface_area(n)
        return np.full((1, points.shape[0]), 1.0 / math.sqrt(area))
    if n == 2:
        return np.vstack([np.cos(k * azimuth), np.sin(k * azimuth)]) / _SQRT_PI

    rows = np.empty((2 * k + 1, points.shape[0]))
    chunk = max(64, _TABLE_BUDGET // (k + 1))
    orders = np.arange(1, k + 1, dtype=float)
    for start in range(0, points.shape[0], chunk):
        stop = start + chunk
        table = legendre_table(k, points[start:stop, 2])
        angles = np.outer(orders, azimuth[start:stop])
        rows[0, start:stop] = table[0] / _SQRT_2PI
        rows[1::2, start:stop] = table[1:] * np.cos(angles) / _SQRT_PI
        rows[2::2, start:stop] = table[1:] * np.sin(angles) / _SQRT_PI
    return rows


@cached(max_size=16)
def _random_coefficients(n: int, k: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng([seed, n, k])
    size = harmonic_dimension(n, k)
    vector = rng.standard_normal(size)
    norm = float(np.linalg.norm(vector))
    while norm == 0.0:
        vector = rng.standard_normal(size)
        norm = float(np.linalg.norm(vector))
    vector = vector / norm
    vector.setflags(write=False)
    return vector


def _split_sphere_coefficients(k: int, coefficients: np.ndarray):
    cos_weights = np.zeros(k + 1)
    sin_weights = np.zeros(k + 1)
    cos_weights[0] = coefficients[0] / _SQRT_2PI
    cos_weights[1:] = coefficients[1::2] / _SQRT_PI
    sin_weights[1:] = coefficients[2::2] / _SQRT_PI
    return cos_weights, sin_weights


@dataclass(frozen=True)
class HarmonicFunction:
    """A spherical harmonic of degree ``degree`` on S^{dim-1}.

    Evaluation is pure and vectorized: call the object with a SpherePoint, a coordinate
    vector, or an (m, n) array of unit points.
    """

    dim: int
    degree: int
    kind: HarmonicKind
    pole: Optional[Tuple[float, ...]] = None
    index: Optional[int] = None
    seed: Optional[int] = None

    @property
    def coefficients(self) -> Optional[np.ndarray]:
        """Coefficient vector over :func:`orthonormal_basis` (basis and random kinds)."""
        if self.kind is HarmonicKind.RANDOM:
            return _random_coefficients(self.dim, self.degree, int(self.seed or 0))
        if self.kind is HarmonicKind.BASIS_ELEMENT:
            vector = np.zeros(harmonic_dimension(self.dim, self.degree))
            vector[int(self.index or 0)] = 1.0
            return vector
        return None

    @property
    def _planar(self) -> bool:
        return self.kind is HarmonicKind.HIGHEST_WEIGHT or self.dim == 2

    def _complex_weight(self) -> complex:
        k = self.degree
        if self.kind is HarmonicKind.HIGHEST_WEIGHT:
            return 1.0 + 0.0j
        if k == 0:
            sign = 1.0
            if self.kind is HarmonicKind.RANDOM:
                sign = float(np.sign(self.coefficients[0]))
            return complex(sign / _SQRT_2PI)
        if self.kind is HarmonicKind.ZONAL:
            pole_angle = math.atan2(self.pole[1], self.pole[0])
            return complex(math.cos(k * pole_angle), -math.sin(k * pole_angle)) / _SQRT_PI
        coefficients = self.coefficients
        return complex(coefficients[0], -coefficients[1]) / _SQRT_PI

    def __call__(self, theta: Any):
        """Evaluate at unit points."""
        points, single = as_points(theta, self.dim)
        values = self._evaluate(points)
        return float(values[0]) if single else values

    def _evaluate(self, points: np.ndarray) -> np.ndarray:
        if self._planar:
            return _re_weighted_power(points, self.degree, self._complex_weight())
        if self.kind is HarmonicKind.ZONAL:
            cosines = np.clip(points @ np.asarray(self.pole), -1.0, 1.0)
            lam = 0.5 * (self.dim - 2)
            log_norm = _zonal_log_norm(self.dim, self.degree)
            return gegenbauer(self.degree, lam, cosines) * math.exp(-log_norm)
        coefficients = self.coefficients
        chunk = max(64, _TABLE_BUDGET // (self.degree + 1))
        values = np.empty(points.shape[0])
        for start in range(0, points.shape[0], chunk):
            block = points[start : start + chunk]
            values[start : start + chunk] = coefficients @ basis_values(
                self.dim, self.degree, block
            )
        return values

    def homogeneous(self, x: Any) -> np.ndarray:
        """Evaluate the degree-k homogeneous harmonic extension r^k Y(x/r)."""
        points, single = as_points(x, self.dim)
        if self._planar:
            values = _re_weighted_power(points, self.degree, self._complex_weight())
        else:
            radii = np.linalg.norm(points, axis=1)
            safe = np.where(radii > 0.0, radii, 1.0)
            values = self._evaluate(points / safe[:, None]) * safe**self.degree
            if self.degree > 0:
                values = np.where(radii > 0.0, values, 0.0)
        return float(values[0]) if single else values

    def gradient(self, x: Any) -> np.ndarray:
        """Gradient of the homogeneous extension.

        Raises:
            UnsupportedDimensionError: For non-planar kinds in dimension 3 or more.
        """
        if not self._planar:
            raise UnsupportedDimensionError(
                "Gradients are implemented for planar and highest-weight harmonics."
            )
        points, single = as_points(x, self.dim)
        result = np.zeros_like(points)
        if self.degree > 0:
            weight = self._complex_weight() * self.degree
            modulus, phase = _complex_power(points, self.degree - 1)
            real = modulus * (weight.real * np.cos(phase) - weight.imag * np.sin(phase))
            imag = modulus * (weight.real * np.sin(phase) + weight.imag * np.cos(phase))
            result[:, 0] = real
            result[:, 1] = -imag
        return result[0] if single else result

    def evaluate_grid(
        self,
        polar_angles: np.ndarray,
        azimuths: np.ndarray,
        table: Optional[np.ndarray] = None,
    ) -> np.ndarray:
        """Evaluate on the S^2 grid (polar angle from e_3) x (azimuth), shape (p, a).

        Args:
            polar_angles: Polar angles measured from e_3.
            azimuths: Azimuths in the (x_1, x_2) plane.
            table: Optional precomputed :func:`legendre_table` at cos(polar_angles).

        Returns:
            The grid of values.

        Raises:
            UnsupportedDimensionError: If the harmonic does not live on S^2.
        """
        if self.dim != 3:
            raise UnsupportedDimensionError("Grid evaluation is defined on S^2 only.")
        polar_angles = np.asarray(polar_angles, dtype=float)
        azimuths = np.asarray(azimuths, dtype=float)
        if self.kind in (HarmonicKind.RANDOM, HarmonicKind.BASIS_ELEMENT):
            k = self.degree
            if table is None:
                table = legendre_table(k, np.cos(polar_angles))
            cos_weights, sin_weights = _split_sphere_coefficients(k, self.coefficients)
            angles = np.outer(np.arange(k + 1, dtype=float), azimuths)
            return (table.T * cos_weights) @ np.cos(angles) + (
                table.T * sin_weights
            ) @ np.sin(angles)
        sines = np.sin(polar_angles)
        points = np.stack(
            [
                np.outer(sines, np.cos(azimuths)),
                np.outer(sines, np.sin(azimuths)),
                np.repeat(np.cos(polar_angles)[:, None], azimuths.size, axis=1),
            ],
            axis=-1,
        ).reshape(-1, 3)
        return self._evaluate(points).reshape(polar_angles.size, azimuths.size)

    @property
    def l2_norm(self) -> float:
        """L2(S^{n-1}) norm, from closed forms or by construction."""
        if self.kind is HarmonicKind.HIGHEST_WEIGHT:
            if self.degree == 0:
                return math.sqrt(sphere_surface_area(self.dim))
            return highest_weight_l2_norm(self.dim, self.degree)
        return 1.0

    @property
    def sup_norm_bound(self) -> float:
        """Deterministic upper bound on sup |Y| over the sphere."""
        return sup_norm_bound(self.dim, self.degree, self.kind)

    def to_dict(self) -> Dict[str, Any]:
        """Return a JSON-ready description (never the numeric coefficients)."""
        data: Dict[str, Any] = {
            "kind": str(self.kind),
            "dim": self.dim,
            "degree": self.degree,
        }
        if self.pole is not None:
            data["pole"] = list(self.pole)
        if self.index is not None:
            data["index"] = self.index
        if self.seed is not None:
            data["seed"] = self.seed
        return data


def dimension_as_float(n: int, k: int) -> float:
    """d_k as a float, computed in log space when the integer is too large."""
    try:
        return float(harmonic_dimension(n, k))
    except HarmonicOverflowError:
        return math.exp(
            math.log(2.0 * k + n - 2)
            + _log_gamma_ratio(float(k), n - 2.0, 1.0)
            - float(gammaln(n - 1.0))
        )


def sup_norm_bound(n: int, k: int, kind: HarmonicKind) -> float:
    """Deterministic upper bound on sup |Y| for a degree-k harmonic of the given kind.

    Highest-weight harmonics attain 1. Unit-norm harmonics obey the addition-theorem
    bound sqrt(d_k / |S^{n-1}|), which zonal harmonics attain at their pole.
    """
    if kind is HarmonicKind.HIGHEST_WEIGHT:
        return 1.0
    if n == 2:
        return 1.0 / (_SQRT_2PI if k == 0 else _SQRT_PI)
    return math.sqrt(dimension_as_float(n, k) / sphere_surface_area(n))


def has_bounded_sup_norms(n: int, kind: HarmonicKind) -> bool:
    """Whether :func:`sup_norm_bound` stays bounded in k for this family."""
    return kind is HarmonicKind.HIGHEST_WEIGHT or n == 2


def highest_weight_harmonic(n: int, k: int) -> HarmonicFunction:
    """Return Q_k as a HarmonicFunction."""
    if n < 2 or k < 0:
        raise DomainError(f"Invalid highest-weight harmonic n={n}, k={k}.")
    return HarmonicFunction(n, k, HarmonicKind.HIGHEST_WEIGHT)


def zonal_harmonic(n: int, k: int, pole: Optional[SpherePoint] = None) -> HarmonicFunction:
    """Return the L2-normalized zonal harmonic of degree k with the given pole."""
    if n < 2 or k < 0:
        raise DomainError(f"Invalid zonal harmonic n={n}, k={k}.")
    if n >= 3 and k > MAX_GEGENBAUER_DEGREE:
        raise HarmonicOverflowError(
            f"Zonal degree {k} exceeds the supported maximum {MAX_GEGENBAUER_DEGREE}."
        )
    pole = pole or SpherePoint.pole(n)
    if pole.dim != n:
        raise DomainError(f"Pole lives in R^{pole.dim}, expected R^{n}.")
    return HarmonicFunction(n, k, HarmonicKind.ZONAL, pole=pole.coords)


def zonal_eval(n: int, k: int, pole: SpherePoint, theta: Any):
    """Evaluate the L2-normalized zonal harmonic Z_k with the given pole."""
    return zonal_harmonic(n, k, pole)(theta)


def orthonormal_basis(n: int, k: int) -> List[HarmonicFunction]:
    """Return the real orthonormal basis of H_k on S^{n-1} for n in {2, 3}.

    Raises:
        UnsupportedDimensionError: If n is not 2 or 3.
        DomainError: If k < 0.
    """
    _check_basis_dimension(n)
    if k < 0:
        raise DomainError(f"Harmonic degree must be nonnegative, got {k}.")
    return [
        HarmonicFunction(n, k, HarmonicKind.BASIS_ELEMENT, index=i)
        for i in range(harmonic_dimension(n, k))
    ]


def random_unit_harmonic(n: int, k: int, seed: Optional[int] = None) -> HarmonicFunction:
    """Draw a harmonic uniformly from the unit sphere of H_k.

    Coefficients are i.i.d. standard Gaussians over :func:`orthonormal_basis`, then
    normalized. They are generated lazily from ``(seed, n, k)``, so the same seed always
    yields the same harmonic.

    Raises:
        UnsupportedDimensionError: If n is not 2 or 3.
        DomainError: If k or the seed is negative.
    """
    _check_basis_dimension(n)
    if k < 0:
        raise DomainError(f"Harmonic degree must be nonnegative, got {k}.")
    if seed is None:
        seed = int(np.random.SeedSequence().entropy % 2**32)
        logger.info("No seed given for random harmonic; drew seed %d.", seed)
    if seed < 0:
        raise DomainError(f"Seeds must be nonnegative, got {seed}.")
    return HarmonicFunction(n, k, HarmonicKind.RANDOM, seed=int(seed))


@dataclass(frozen=True)
class SupNormEstimate:
    """Grid estimate of a sup norm: a lower bound with the grid spacing attached."""

    value: float
    spacing: Optional[float]
    points: int


def estimate_sup_norm(
    harmonic: HarmonicFunction,
    resolution: Optional[int] = None,
    table: Optional[np.ndarray] = None,
) -> SupNormEstimate:
    """Estimate sup |Y| by dense sampling.

    n=2 uses ``resolution`` (default 2^16) uniform angles; n=3 a polar-by-azimuth grid of
    ``resolution`` (default 256) angles each way; other dimensions use 2^16 seeded uniform
    samples without a spacing.

    Returns:
        The sampled maximum, which is a lower bound of the sup norm.
    """
    if harmonic.dim == 2:
        count = resolution or 2**16
        angles = 2.0 * np.pi * np.arange(count) / count
        values = harmonic(np.column_stack([np.cos(angles), np.sin(angles)]))
        return SupNormEstimate(float(np.max(np.abs(values))), 2.0 * np.pi / count, count)
    if harmonic.dim == 3:
        count = resolution or 256
        polar = (np.arange(count) + 0.5) * np.pi / count
        azimuths = 2.0 * np.pi * np.arange(count) / count
        values = harmonic.evaluate_grid(polar, azimuths, table=table)
        return SupNormEstimate(float(np.max(np.abs(values))), np.pi / count, count * count)

    points = random_sphere_points(harmonic.dim, resolution or 2**16, seed=0)
    values = harmonic(points)
    return SupNormEstimate(float(np.max(np.abs(values))), None, points.shape[0])
