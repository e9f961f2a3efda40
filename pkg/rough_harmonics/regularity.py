"""Regularity diagnostics: spectral Sobolev sums, Dirichlet energy, Hölder moduli, Fourier decay.

Nothing here asserts membership or non-membership in a function space. Partial sums,
fitted growth exponents and moduli are reported, and verdicts only describe what the
computed numbers do over the examined range.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from joblib import Parallel, delayed

from rough_harmonics.exceptions import (
    DomainError,
    InsufficientQuadratureError,
    UnsupportedDimensionError,
)
from rough_harmonics.harmonics import (
    HarmonicKind,
    basis_values,
    highest_weight_l2_norm,
    iter_legendre_tables,
    log_eigenvalue,
)
from rough_harmonics.helpers._enums import ValueEnum
from rough_harmonics.helpers._fitting import LineFit, fit_line
from rough_harmonics.series import BallSeries, RadialKind, SeriesVariant
from rough_harmonics.sphere import (
    QuadratureRule,
    build_annulus_rule,
    build_sphere_quadrature,
    sphere_surface_area,
)

logger = logging.getLogger(__name__)

MIN_FIT_BLOCKS = 6
DIVERGENCE_R_SQUARED = 0.99
FLAT_SLOPE = 0.02
FOURIER_GROWTH_SLOPE = 0.02
DEFAULT_SCALES = tuple(2.0**-i for i in range(20, 1, -1))

_SQRT_PI = math.sqrt(math.pi)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


class SobolevVerdict(ValueEnum):
    """Outcome of a Sobolev partial-sum scan."""

    CONVERGENT = "convergent"
    DIVERGENT = "divergent"
    DIVERGENT_MARGINAL = "divergent-marginal"
    INCONCLUSIVE = "inconclusive"


class FourierVerdict(ValueEnum):
    """Outcome of a windowed Fourier decay certificate."""

    BOUNDED = "bounded"
    GROWING = "growing"


@dataclass
class SpectralCoefficients:
    """Inner products <u, Y_{k,j}> for k <= K, grouped by degree."""

    dim: int
    max_degree: int
    coefficients: Dict[int, np.ndarray]

    def degree_energy(self, k: int) -> float:
        """sum_j |<u, Y_{k,j}>|^2."""
        return float(np.sum(self.coefficients[k] ** 2))

    def to_rows(self) -> List[Dict[str, Any]]:
        """One row per degree: k and the squared sum."""
        return [
            {"k": k, "sum_sq": self.degree_energy(k)} for k in sorted(self.coefficients)
        ]


def _boundary_function(source: Any) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(source, BallSeries):
        return source.trace
    return source


def spectral_coefficients(
    boundary_values: Union[BallSeries, Callable[[np.ndarray], np.ndarray]],
    n: int,
    max_degree: int,
    rule: Optional[QuadratureRule] = None,
) -> SpectralCoefficients:
    """Project boundary values onto the orthonormal bases of degrees 0..K.

    Args:
        boundary_values: A series (its trace is used) or a vectorized function of unit
            points.
        n: Sphere dimension, 2 or 3.
        max_degree: K.
        rule: A product rule of degree at least 2K (built when omitted).

    Returns:
        All inner products through degree K.

    Raises:
        UnsupportedDimensionError: If n is not 2 or 3.
        InsufficientQuadratureError: If the rule cannot integrate degree-2K products.
    """
    if n not in (2, 3):
        raise UnsupportedDimensionError(f"Spectral coefficients need n in {{2, 3}}, got {n}.")
    if rule is None:
        rule = build_sphere_quadrature(n, max(2 * max_degree, 1))
    if rule.mode != "product" or rule.degree < 2 * max_degree:
        raise InsufficientQuadratureError(
            f"A {rule.mode} rule of degree {rule.degree} cannot resolve degree "
            f"{max_degree} coefficients; need a product rule of degree >= {2 * max_degree}."
        )
    values = np.asarray(_boundary_function(boundary_values)(rule.nodes), dtype=float)
    weighted = values * rule.weights

    coefficients: Dict[int, np.ndarray] = {}
    if n == 2:
        for k in range(max_degree + 1):
            coefficients[k] = basis_values(2, k, rule.nodes) @ weighted
    else:
        azimuth = np.arctan2(rule.nodes[:, 1], rule.nodes[:, 0])
        for k, table in iter_legendre_tables(max_degree, rule.nodes[:, 2]):
            result = np.empty(2 * k + 1)
            result[0] = table[0] @ weighted / _SQRT_2PI
            if k:
                angles = np.outer(np.arange(1, k + 1), azimuth)
                result[1::2] = (table[1:] * np.cos(angles)) @ weighted / _SQRT_PI
                result[2::2] = (table[1:] * np.sin(angles)) @ weighted / _SQRT_PI
            coefficients[k] = result
    return SpectralCoefficients(n, max_degree, coefficients)


def harmonic_norm_squared(kind: HarmonicKind, n: int, k: int) -> float:
    """||Y_k||_2^2 for the harmonics a series pairs with its coefficients."""
    if kind is HarmonicKind.HIGHEST_WEIGHT:
        if k == 0:
            return sphere_surface_area(n)
        return highest_weight_l2_norm(n, k) ** 2
    return 1.0


def _weighted_energy(n: int, k: int, sigma: float, energy: float) -> float:
    """mu_k^sigma * energy, with mu_0^0 = 1."""
    if energy == 0.0:
        return 0.0
    if k == 0:
        return energy if sigma == 0.0 else 0.0
    return math.exp(sigma * log_eigenvalue(n, k)) * energy


def _series_degree_energy(series: BallSeries, k: int) -> float:
    a = series.schedule.coefficient(k)
    return a * a * harmonic_norm_squared(series.kind, series.dim, k)


def sobolev_partial_sum(
    source: Union[BallSeries, SpectralCoefficients], sigma: float, max_degree: int
) -> float:
    """S_K(sigma) = sum_{k <= K} mu_k^sigma sum_j |<u, Y_{k,j}>|^2.

    Schedule-backed series use sum_j |<u, Y_{k,j}>|^2 = a_k^2 ||Y_k||_2^2 exactly, for any
    K regardless of the series truncation.

    Raises:
        DomainError: If sigma < 0.
    """
    if sigma < 0.0:
        raise DomainError(f"sigma must be nonnegative, got {sigma}.")
    if isinstance(source, SpectralCoefficients):
        return math.fsum(
            _weighted_energy(source.dim, k, sigma, source.degree_energy(k))
            for k in sorted(source.coefficients)
            if k <= max_degree
        )
    return math.fsum(
        _weighted_energy(source.dim, k, sigma, _series_degree_energy(source, k))
        for k in source.schedule.support(max_degree)
    )


@dataclass(frozen=True)
class BlockIncrement:
    """Contribution of one dyadic block to S_K(sigma)."""

    block: int
    degree: int
    increment: float
    normalized: float
    partial_sum: float


def sobolev_block_increments(
    series: BallSeries, sigma: float, max_degree: int
) -> List[BlockIncrement]:
    """Per-block increments of S_K(sigma) and the increments normalized by the block weight.

    Normalizing divides by the sub-geometric part of a_k^2 (j^-4 for the inverse-square
    law), which leaves the geometric growth rate visible.
    """
    if sigma < 0.0:
        raise DomainError(f"sigma must be nonnegative, got {sigma}.")
    schedule = series.schedule
    blocks = []
    running = 0.0
    for k in schedule.support(max_degree):
        increment = _weighted_energy(series.dim, k, sigma, _series_degree_energy(series, k))
        running += increment
        j = schedule.block_index(k)
        blocks.append(
            BlockIncrement(
                block=j if j is not None else k,
                degree=k,
                increment=increment,
                normalized=increment / schedule.block_weight(k),
                partial_sum=running,
            )
        )
    return blocks


def expected_sobolev_threshold(
    variant: Union[SeriesVariant, str], n: int, alpha: Optional[float] = None
) -> Optional[float]:
    """Analytically expected boundary exponent sigma_0; interior s_0 = sigma_0 + 1/2.

    Divergence for sigma > sigma_0 is the expected interpretation of a scan, not a
    computed fact. Returns None for custom series.
    """
    variant = SeriesVariant(variant)
    if variant in (SeriesVariant.NOT_HS, SeriesVariant.ZONAL):
        return 0.0
    if variant is SeriesVariant.NOT_C_BETA:
        return (n - 2) / 4.0
    if variant is SeriesVariant.ANYN_HOLDER:
        return float(alpha or 0.0) + (n - 2) / 4.0
    if variant is SeriesVariant.HADAMARD_2D:
        return 0.5
    return None


@dataclass
class SobolevScan:
    """Partial sums of one sigma with the growth fit and verdict."""

    sigma: float
    blocks: List[Tuple[int, float]]
    verdict: SobolevVerdict
    fitted_exponent: Optional[float]
    r_squared: Optional[float]
    limit_estimate: Optional[float]
    ratios: List[Tuple[int, float]] = field(default_factory=list)
    expected_threshold: Optional[float] = None

    @property
    def s(self) -> float:
        """Interior Sobolev exponent s = sigma + 1/2 matching this boundary exponent."""
        return self.sigma + 0.5

    @property
    def last_partial_sum(self) -> float:
        """S_K at the largest scanned K."""
        return self.blocks[-1][1] if self.blocks else 0.0

    def to_dict(self) -> Dict[str, Any]:
        """JSON document: sigma, blocks, verdict and fitted exponent."""
        return {
            "sigma": self.sigma,
            "s": self.s,
            "blocks": [{"K": k, "S_K": value} for k, value in self.blocks],
            "verdict": str(self.verdict),
            "fitted_exponent": self.fitted_exponent,
            "r_squared": self.r_squared,
            "limit_estimate": self.limit_estimate,
            "ratios": [{"block": j, "ratio": r} for j, r in self.ratios],
            "expected_threshold": self.expected_threshold,
        }


def _classify(
    series: BallSeries, blocks: List[BlockIncrement]
) -> Tuple[SobolevVerdict, Optional[LineFit], Optional[float]]:
    """Fit log2 of the normalized increments of the last blocks against the block index."""
    if not blocks:
        return SobolevVerdict.CONVERGENT, None, 0.0
    last = blocks[-1]
    if all(b.increment == 0.0 for b in blocks[-MIN_FIT_BLOCKS:]):
        return SobolevVerdict.CONVERGENT, None, last.partial_sum
    count = max(MIN_FIT_BLOCKS, len(blocks) // 2)
    tail = [b for b in blocks[-count:] if b.normalized > 0.0]
    if len(tail) < MIN_FIT_BLOCKS:
        return SobolevVerdict.INCONCLUSIVE, None, None

    fit = fit_line(
        np.array([b.block for b in tail], dtype=float),
        np.log2([b.normalized for b in tail]),
    )
    schedule = series.schedule
    if fit.slope > FLAT_SLOPE:
        if fit.r_squared >= DIVERGENCE_R_SQUARED:
            return SobolevVerdict.DIVERGENT, fit, None
        return SobolevVerdict.INCONCLUSIVE, fit, None
    if fit.slope < -FLAT_SLOPE:
        ratio = 2.0**fit.slope
        return SobolevVerdict.CONVERGENT, fit, last.partial_sum + last.increment * ratio / (
            1.0 - ratio
        )
    if schedule.summable_block_weight:
        level = float(np.mean([b.normalized for b in tail]))
        return (
            SobolevVerdict.CONVERGENT,
            fit,
            last.partial_sum + level * schedule.block_weight_tail(last.degree),
        )
    return SobolevVerdict.DIVERGENT_MARGINAL, fit, None


def classify_sobolev(
    series: BallSeries,
    sigma_grid: Sequence[float],
    k_grid: Optional[Sequence[int]] = None,
) -> List[SobolevScan]:
    """Scan S_K(sigma) over dyadic K for every sigma and classify the growth.

    Divergent means the normalized block increments grow geometrically (fitted exponent
    above 0.02 with R^2 >= 0.99 over at least 6 blocks); convergent means they decay
    geometrically, or stay flat against summable block weights. Flat increments with
    non-summable weights are reported as divergent-marginal; anything else is
    inconclusive.

    Args:
        series: A schedule-backed series.
        sigma_grid: Boundary exponents in [0, 2].
        k_grid: Dyadic K values at which to report S_K (defaults to every support degree
            up to the series truncation).

    Returns:
        One scan per sigma.
    """
    expected = expected_sobolev_threshold(series.variant, series.dim, series.schedule.alpha)
    max_degree = max(k_grid) if k_grid else series.truncation
    scans = []
    for sigma in sigma_grid:
        if not 0.0 <= sigma <= 2.0:
            raise DomainError(f"sigma must lie in [0, 2], got {sigma}.")
        blocks = sobolev_block_increments(series, sigma, max_degree)
        verdict, fit, limit = _classify(series, blocks)
        if k_grid:
            reported = [(int(k), sobolev_partial_sum(series, sigma, int(k))) for k in k_grid]
        else:
            reported = [(b.degree, b.partial_sum) for b in blocks]
        ratios = [
            (later.block, later.normalized / earlier.normalized)
            for earlier, later in zip(blocks, blocks[1:])
            if earlier.normalized > 0.0
        ]
        scan = SobolevScan(
            sigma=float(sigma),
            blocks=reported,
            verdict=verdict,
            fitted_exponent=fit.slope if fit else None,
            r_squared=fit.r_squared if fit else None,
            limit_estimate=limit,
            ratios=ratios,
            expected_threshold=expected,
        )
        if verdict is SobolevVerdict.INCONCLUSIVE:
            logger.warning("Sobolev scan at sigma=%s is inconclusive.", sigma)
        logger.debug("sigma=%s verdict=%s fit=%s", sigma, verdict, fit)
        scans.append(scan)
    return scans


def _require_planar(series: BallSeries) -> None:
    if series.dim != 2:
        raise UnsupportedDimensionError(
            f"Dirichlet energy is implemented on the disk, got n={series.dim}."
        )
    if series.radial is not RadialKind.INTERIOR:
        raise DomainError("Dirichlet energy needs an interior series.")


def dirichlet_energy_2d(
    series: BallSeries, max_degree: Optional[int] = None, mode: str = "formula"
) -> float:
    """Dirichlet energy of the truncation u_K on the unit disk.

    ``formula`` returns sum_{k <= K} k a_k^2 ||Y_k||_2^2, which is pi sum k a_k^2 for
    cos(kt) terms. ``quadrature`` integrates |grad u_K|^2 with an annulus rule exact for
    the polynomial integrand.

    Raises:
        UnsupportedDimensionError: If n != 2.
        DomainError: On an unknown mode or K above the series truncation in quadrature mode.
    """
    _require_planar(series)
    max_degree = series.truncation if max_degree is None else max_degree
    if mode == "formula":
        return math.fsum(
            k * _series_degree_energy(series, k) for k in series.schedule.support(max_degree)
        )
    if mode != "quadrature":
        raise DomainError(f"Unknown energy mode '{mode}'.")
    if max_degree > series.truncation:
        raise DomainError("Quadrature energy needs K within the series truncation.")
    truncated = series.truncated(max_degree)
    k_eff = max(truncated.max_degree, 1)
    angular = build_sphere_quadrature(2, 2 * k_eff + 2)
    rule = build_annulus_rule(2, 0.0, 1.0, k_eff + 2, angular)

    def integrand(points: np.ndarray) -> np.ndarray:
        gradient = truncated.gradient(points)
        return np.sum(gradient * gradient, axis=1)

    return rule.integrate(integrand)


def energy_partial_sums(series: BallSeries, terms: int) -> List[Tuple[int, float]]:
    """Formula energies of the 1..J-term truncations, as (K, energy) pairs."""
    _require_planar(series)
    degrees = []
    for k in series.schedule.iter_support():
        if len(degrees) == terms:
            break
        degrees.append(k)
    result = []
    running = 0.0
    for k in degrees:
        running += k * _series_degree_energy(series, k)
        result.append((k, running))
    return result


@dataclass
class ModulusTable:
    """Measured moduli of continuity at dyadic scales with the fitted exponent."""

    scales: np.ndarray
    moduli: np.ndarray
    slope: float
    intercept: float
    residual: float
    r_squared: float
    fitted_range: Tuple[float, float]

    def to_rows(self) -> List[Dict[str, float]]:
        """Rows with header delta, omega."""
        return [
            {"delta": float(d), "omega": float(w)} for d, w in zip(self.scales, self.moduli)
        ]


def _batch_modulus(
    f: Callable[[np.ndarray], np.ndarray],
    scales: np.ndarray,
    count: int,
    seed: np.random.SeedSequence,
    domain: Tuple[float, float],
) -> np.ndarray:
    rng = np.random.default_rng(seed)
    lo, hi = domain
    moduli = np.zeros(scales.size)
    for i, delta in enumerate(scales):
        t = rng.uniform(lo, hi - delta, count)
        moduli[i] = np.max(np.abs(f(t + delta) - f(t)))
    return moduli


def holder_modulus(
    f: Callable[[np.ndarray], np.ndarray],
    scales: Optional[Sequence[float]] = None,
    sample_count: int = 10_000,
    seed: int = 0,
    domain: Tuple[float, float] = (0.0, 2.0 * math.pi),
    fit_range: Optional[Tuple[float, float]] = None,
    batches: int = 4,
    n_jobs: int = 1,
) -> ModulusTable:
    """Estimate omega(delta) = max |f(t+delta) - f(t)| over sampled t, and its exponent.

    Samples are split into batches with independent child seeds; batch maxima combine by
    max, so the result does not depend on ``n_jobs``. The fitted exponent is the least
    squares slope of log omega against log delta after discarding the two largest and
    two smallest scales of the fitted range.

    Args:
        f: Vectorized function of t.
        scales: Dyadic scales in [2^-20, 2^-2] (default: all of them).
        sample_count: Total samples per scale, at least 10^4.
        seed: Root seed.
        domain: Interval containing t and t + delta.
        fit_range: Optional (min, max) scales to fit over.
        batches: Number of sampling batches.
        n_jobs: joblib workers.

    Returns:
        The modulus table.
    """
    scale_array = np.sort(np.asarray(scales if scales is not None else DEFAULT_SCALES, float))
    if np.any(scale_array < 2.0**-20 * (1 - 1e-12)) or np.any(scale_array > 0.25 * (1 + 1e-12)):
        raise DomainError("Modulus scales must lie in [2^-20, 2^-2].")
    if sample_count < 10_000:
        raise DomainError(f"Need at least 10^4 samples, got {sample_count}.")
    children = np.random.SeedSequence(seed).spawn(batches)
    per_batch = int(math.ceil(sample_count / batches))
    results = Parallel(n_jobs=n_jobs)(
        delayed(_batch_modulus)(f, scale_array, per_batch, child, domain) for child in children
    )
    moduli = np.maximum.accumulate(np.max(np.vstack(results), axis=0))

    selected = np.ones(scale_array.size, dtype=bool)
    if fit_range is not None:
        selected = (scale_array >= fit_range[0] * (1 - 1e-12)) & (
            scale_array <= fit_range[1] * (1 + 1e-12)
        )
    indices = np.flatnonzero(selected)
    if indices.size > 8:
        indices = indices[2:-2]
    fit = fit_line(np.log(scale_array[indices]), np.log(moduli[indices]))
    return ModulusTable(
        scales=scale_array,
        moduli=moduli,
        slope=fit.slope,
        intercept=fit.intercept,
        residual=fit.residual,
        r_squared=fit.r_squared,
        fitted_range=(float(scale_array[indices[0]]), float(scale_array[indices[-1]])),
    )


@dataclass
class FourierCertificate:
    """Windowed bounds C_i = max_{k in window i} |c_k| k^alpha and the growth verdict."""

    alpha: float
    coefficients: np.ndarray = field(repr=False)
    windows: List[Tuple[int, int, float]]
    running_sup: List[float]
    growth_exponent: Optional[float]
    verdict: FourierVerdict

    def to_rows(self) -> List[Dict[str, Any]]:
        """One row per dyadic window."""
        return [
            {"window": i, "k_lo": lo, "k_hi": hi, "C": c, "sup_C": s}
            for i, ((lo, hi, c), s) in enumerate(zip(self.windows, self.running_sup))
        ]


def cosine_coefficients(samples: np.ndarray) -> np.ndarray:
    """c_k with f(t) ~ c_0/2 + sum c_k cos(kt), from N uniform samples on [0, 2 pi)."""
    samples = np.asarray(samples, dtype=float)
    return 2.0 * np.real(np.fft.rfft(samples)) / samples.size


def fourier_decay_certificate(
    samples: np.ndarray, alpha: float, max_frequency: Optional[int] = None
) -> FourierCertificate:
    """Bound |c_k| <= C k^-alpha on dyadic windows [2^i, 2^{i+1}) and judge C's growth.

    log2 C_i over the active windows is fitted as a + g i + p log2 i; the certificate is
    growing when g > 0.02 and bounded otherwise (also when fewer than 3 windows are
    active).

    Raises:
        DomainError: If the sample count is not a power of two.
        InsufficientQuadratureError: If ``max_frequency`` exceeds N/4.
    """
    size = int(np.asarray(samples).size)
    if size < 8 or size & (size - 1):
        raise DomainError(f"Sample count must be a power of two >= 8, got {size}.")
    limit = size // 4
    if max_frequency is None:
        max_frequency = limit
    if max_frequency > limit:
        raise InsufficientQuadratureError(
            f"Frequencies up to {max_frequency} need more than {size} samples (k <= N/4)."
        )
    coefficients = cosine_coefficients(samples)
    magnitudes = np.abs(coefficients)
    floor = 1e-12 * max(float(magnitudes[1 : max_frequency + 1].max(initial=0.0)), 1e-300)

    windows: List[Tuple[int, int, float]] = []
    running: List[float] = []
    active: List[Tuple[int, float]] = []
    best = 0.0
    i = 0
    while 2**i <= max_frequency:
        lo, hi = 2**i, min(2 ** (i + 1) - 1, max_frequency)
        k = np.arange(lo, hi + 1)
        window = magnitudes[lo : hi + 1]
        bound = float(np.max(window * k.astype(float) ** alpha))
        windows.append((lo, hi, bound))
        best = max(best, bound)
        running.append(best)
        if float(window.max()) > floor:
            active.append((i, bound))
        i += 1

    growth = None
    verdict = FourierVerdict.BOUNDED
    if len(active) >= 3:
        index = np.array([a[0] for a in active], dtype=float)
        design = np.column_stack(
            [np.ones_like(index), index, np.log2(np.maximum(index, 1.0))]
        )
        solution, *_ = np.linalg.lstsq(design, np.log2([a[1] for a in active]), rcond=None)
        growth = float(solution[1])
        if growth > FOURIER_GROWTH_SLOPE:
            verdict = FourierVerdict.GROWING
    return FourierCertificate(
        alpha=alpha,
        coefficients=coefficients,
        windows=windows,
        running_sup=running,
        growth_exponent=growth,
        verdict=verdict,
    )
