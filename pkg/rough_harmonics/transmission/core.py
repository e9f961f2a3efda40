"""Nonlinear transmission examples on Omega = 2B_n with inclusion omega = B_n.

The inner solution is a ball series u^i with boundary trace Phi; the outer solution is
u^o = -u*, the negated Kelvin transform. The interface data are
F(theta, t) = Psi(t) - 2 Phi(theta) and G(theta, t) = (n-2) Phi(theta).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from rough_harmonics.exceptions import (
    DomainError,
    IncompatibleVariantError,
    NumericalError,
    TruncationError,
)
from rough_harmonics.harmonics import HarmonicKind
from rough_harmonics.helpers._enums import ValueEnum
from rough_harmonics.series import BallSeries, SeriesVariant, build_series
from rough_harmonics.sphere import SpherePoint, as_points, random_sphere_points

logger = logging.getLogger(__name__)

DEFAULT_TRUNCATION = 2**10
RHO_MARGIN = 1e-3
OUTER_RADIUS = 2.0
DELTA_ONE = 3.0
DELTA_TWO = 0.0

# Largest degree whose phase k * angle is still meaningful in double precision.
_PHI_EXTENSION_DEGREE = 2**26
_NEWTON_BUDGET = 100


class TransmissionVariant(ValueEnum):
    """The three explicit examples."""

    #: Inverse-square law with random harmonics.
    EXAMPLE = "example"

    #: Inverse-square law with highest-weight harmonics.
    TILDE = "tilde"

    #: Dyadic Hölder law with highest-weight harmonics.
    HOLDER = "holder"


_SERIES_VARIANTS = {
    TransmissionVariant.EXAMPLE: SeriesVariant.NOT_HS,
    TransmissionVariant.TILDE: SeriesVariant.NOT_C_BETA,
    TransmissionVariant.HOLDER: SeriesVariant.ANYN_HOLDER,
}


def psi_eval(t: Any):
    """Psi(t) = t for |t| <= 1 and t^3 otherwise."""
    t_array = np.asarray(t, dtype=float)
    values = np.where(np.abs(t_array) <= 1.0, t_array, t_array**3)
    return float(values) if values.ndim == 0 else values


@dataclass(frozen=True, eq=False)
class TransmissionInstance:
    """One truncated transmission example with its solution pair.

    Attributes:
        dim: Ambient dimension n.
        variant: Which example.
        rho: Scale applied to the coefficients.
        truncation: K.
        inner: u^i, whose trace on S^{n-1} is Phi_K.
        outer: u^o = -(u^i)*, defined on 1 <= |x| <= 2.
        certificate: Normal-convergence certificate of the unscaled Phi.
        certificate_is_truncated: True when only the truncation admits a finite certificate.
        seed: Seed of the random harmonics (``example`` only).
        alpha: Exponent of the ``holder`` example.
    """

    dim: int
    variant: TransmissionVariant
    rho: float
    truncation: int
    inner: BallSeries = field(repr=False)
    outer: BallSeries = field(repr=False)
    certificate: float
    certificate_is_truncated: bool = False
    seed: Optional[int] = None
    alpha: Optional[float] = None

    @property
    def sup_bound(self) -> float:
        """M = rho * certificate, an upper bound on |Phi|."""
        return self.rho * self.certificate

    def phi(self, theta: Any):
        """Phi_K(theta), the trace of the truncated inner solution."""
        return self.inner.trace(theta)

    def h(self, x: Any):
        """Outer Dirichlet data on 2S^{n-1}; see :func:`h_eval`."""
        return h_eval(self, x)

    def to_dict(self) -> Dict[str, Any]:
        """Instance configuration: the inner series document plus the example parameters."""
        data = self.inner.to_dict()
        data.update({"transmission_variant": str(self.variant), "rho": self.rho})
        if self.alpha is not None:
            data["alpha"] = self.alpha
        if self.seed is not None:
            data["seed"] = self.seed
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TransmissionInstance":
        """Rebuild an instance from :meth:`to_dict` output."""
        return build_instance(
            data["transmission_variant"],
            int(data["dim"]),
            int(data["K"]),
            rho=float(data["rho"]),
            seed=data.get("seed"),
            alpha=data.get("alpha"),
        )


def build_instance(
    variant: Union[TransmissionVariant, str],
    n: int,
    truncation: int = DEFAULT_TRUNCATION,
    rho: Optional[float] = None,
    seed: Optional[int] = None,
    alpha: Optional[float] = None,
) -> TransmissionInstance:
    """Build a transmission example.

    The default scale rho = (1 - 1e-3) / M_cert keeps |Phi| <= 1 - 1e-3, so Psi acts as
    the identity on the trace range. With rho = 1 the inner trace can exceed 1 and the
    interface condition fails where it does; such runs are logged as diagnostics.

    Raises:
        IncompatibleVariantError: For ``example`` outside n in {2, 3}.
        DomainError: For ``holder`` without alpha in (0, 1), or a nonpositive rho.
    """
    variant = TransmissionVariant(variant)
    if n < 2:
        raise DomainError(f"Dimension must be at least 2, got {n}.")
    if variant is TransmissionVariant.EXAMPLE and n not in (2, 3):
        raise IncompatibleVariantError("The example variant needs n in {2, 3}.")
    if variant is TransmissionVariant.HOLDER:
        if alpha is None or not 0.0 < alpha < 1.0:
            raise DomainError(f"The holder example needs alpha in (0, 1), got {alpha}.")
    else:
        alpha = None

    base = build_series(_SERIES_VARIANTS[variant], n, truncation, seed=seed, alpha=alpha)
    certificate = base.certificate
    truncated_only = math.isinf(certificate)
    if truncated_only:
        certificate = base.truncated_certificate
        logger.warning(
            "Phi has no finite certificate for n=%d; bounding the truncation only "
            "(M=%.6g).",
            n,
            certificate,
        )
    if rho is None:
        rho = (1.0 - RHO_MARGIN) / certificate if certificate > 0 else 1.0
    if not rho > 0.0:
        raise DomainError(f"rho must be positive, got {rho}.")
    if rho * certificate > 1.0:
        logger.warning(
            "rho=%.6g allows |Phi| up to %.6g > 1: Psi(Phi) != Phi where |Phi| > 1 and "
            "the interface condition u^o = F(., u^i) is expected to fail there.",
            rho,
            rho * certificate,
        )

    inner = base.scaled(rho)
    outer = inner.kelvin_transform().negated()
    return TransmissionInstance(
        dim=n,
        variant=variant,
        rho=float(rho),
        truncation=int(truncation),
        inner=inner,
        outer=outer,
        certificate=float(certificate),
        certificate_is_truncated=truncated_only,
        seed=base.seed,
        alpha=alpha,
    )


@dataclass(frozen=True)
class PhiEvaluation:
    """Phi(theta) of the infinite series, within ``tail_bound``."""

    value: Union[float, np.ndarray]
    tail_bound: float
    degree: int


def _on_first_axis(points: np.ndarray) -> np.ndarray:
    return (points[:, 0] == 1.0) & np.all(points[:, 1:] == 0.0, axis=1)


def phi_eval(instance: TransmissionInstance, theta: Any, tol: float = 1e-6) -> PhiEvaluation:
    """Evaluate Phi = trace of the full (untruncated) inner series.

    The series is extended past K until the tail bound drops below ``tol`` or the degree
    reaches 2^26. Highest-weight harmonics equal 1 at e_1, where the omitted tail is
    added in closed form and the value is exact.

    Raises:
        TruncationError: If the series has no finite tail bound on the sphere.
    """
    points, single = as_points(theta, instance.dim)
    inner = instance.inner
    if not inner.bounded_weights:
        raise TruncationError(
            "Phi has no certified tail on the sphere for this harmonic family; "
            "use the truncated trace instead."
        )
    degree = max(instance.truncation, 1)
    closed_form = inner.kind is HarmonicKind.HIGHEST_WEIGHT and bool(
        np.all(_on_first_axis(points))
    )
    while not closed_form and inner.tail_bound(1.0) > tol and degree < _PHI_EXTENSION_DEGREE:
        degree = min(degree * 2, _PHI_EXTENSION_DEGREE)
        inner = build_series(
            inner.variant,
            instance.dim,
            degree,
            scale=instance.rho,
            seed=instance.seed,
            alpha=instance.alpha,
        )
    values = inner.trace(points)
    tail = inner.tail_bound(1.0)
    if inner.kind is HarmonicKind.HIGHEST_WEIGHT:
        exact = _on_first_axis(points)
        if np.any(exact):
            values = np.where(exact, values + inner.schedule.tail_sum(inner.truncation), values)
            if np.all(exact):
                tail = 0.0
    if tail > tol:
        logger.warning("Phi tail bound %.3g exceeds tolerance %.3g.", tail, tol)
    return PhiEvaluation(float(values[0]) if single else values, tail, inner.truncation)


def F_G_eval(  # noqa: N802
    instance: TransmissionInstance, theta: Any, t: Any, tol: Optional[float] = None
) -> Tuple[Any, Any]:
    """Return (F(theta, t), G(theta, t)).

    Phi is the truncated trace by default, or the full series evaluated to ``tol``.
    """
    if tol is None:
        phi = instance.phi(theta)
    else:
        phi = phi_eval(instance, theta, tol).value
    phi = np.asarray(phi, dtype=float)
    f_value = np.asarray(psi_eval(t)) - 2.0 * phi
    g_value = (instance.dim - 2) * phi * np.ones_like(f_value)
    if f_value.ndim == 0:
        return float(f_value), float(g_value)
    return f_value, g_value


def solve_id_plus_psi(z: Any, tol: float = 1e-12) -> Any:
    """Solve t + Psi(t) = z for every entry of z.

    |z| <= 2 lies on the linear branch (t = z/2). Otherwise the root of t^3 + t = |z| lies
    in (1, |z|^(1/3)); Newton steps that leave the bracket fall back to bisection.

    Raises:
        NumericalError: If the iteration budget is exhausted.
    """
    z_array = np.atleast_1d(np.asarray(z, dtype=float))
    t = 0.5 * z_array
    cubic = np.abs(z_array) > 2.0
    if np.any(cubic):
        target = np.abs(z_array[cubic])
        lo = np.ones_like(target)
        hi = np.cbrt(target)
        root = hi.copy()
        threshold = tol * np.maximum(1.0, target)
        for _ in range(_NEWTON_BUDGET):
            residual = root**3 + root - target
            if np.all(np.abs(residual) <= threshold):
                break
            lo = np.where(residual < 0.0, root, lo)
            hi = np.where(residual > 0.0, root, hi)
            step = root - residual / (3.0 * root**2 + 1.0)
            outside = (step <= lo) | (step >= hi)
            root = np.where(outside, 0.5 * (lo + hi), step)
        else:
            raise NumericalError("Inversion of t + Psi(t) did not converge.")
        t[cubic] = np.sign(z_array[cubic]) * root
    return float(t[0]) if np.ndim(z) == 0 else t


def invert_id_plus_F(  # noqa: N802
    instance: TransmissionInstance, theta: Any, y: Any, tol: float = 1e-12
) -> Any:
    """Return t with t + F(theta, t) = y, i.e. t + Psi(t) = y + 2 Phi_K(theta)."""
    phi = np.asarray(instance.phi(theta), dtype=float)
    return solve_id_plus_psi(np.asarray(y, dtype=float) + 2.0 * phi, tol)


@dataclass
class GrowthCertificate:
    """Constants of the growth conditions and the grid evidence for them.

    |F| >= c1 |t|^delta1 - 1/c1 and |G| <= c2 (1 + |F|)^delta2.
    """

    c1: float
    c2: float
    delta1: float
    delta2: float
    sup_bound: float
    analytic: Dict[str, bool]
    lower_slack: float
    upper_slack: float
    witness: Optional[Dict[str, Any]] = None

    @property
    def passed(self) -> bool:
        """True when every analytic branch check and grid inequality holds."""
        return (
            all(self.analytic.values()) and self.lower_slack >= 0.0 and self.upper_slack >= 0.0
        )

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready summary."""
        return {
            "c1": self.c1,
            "c2": self.c2,
            "delta1": self.delta1,
            "delta2": self.delta2,
            "M": self.sup_bound,
            "analytic": self.analytic,
            "lower_slack": self.lower_slack,
            "upper_slack": self.upper_slack,
            "passed": self.passed,
            "witness": self.witness,
        }


def default_theta_grid(n: int, count: int = 2000, seed: int = 0) -> np.ndarray:
    """Seeded uniform sphere sample with both poles +-e_1 appended."""
    pole = SpherePoint.pole(n).as_array()
    return np.vstack([random_sphere_points(n, count, seed), pole, -pole])


def certify_growth(
    instance: TransmissionInstance,
    t_grid: Optional[np.ndarray] = None,
    theta_grid: Optional[np.ndarray] = None,
) -> GrowthCertificate:
    """Construct and check the growth constants.

    c1 = min(1, 1/(2M)), c2 = (n-2) M, delta1 = 3, delta2 = 0 with M = sup-bound of
    |Phi|. On |t| <= 1 the lower bound needs 1/c1 >= 2M; on |t| > 1 it also needs c1 <= 1;
    both are checked directly and then on the grid.
    """
    t_grid = np.linspace(-10.0, 10.0, 2001) if t_grid is None else np.asarray(t_grid, float)
    theta_grid = default_theta_grid(instance.dim) if theta_grid is None else theta_grid
    m_bound = instance.sup_bound
    c1 = min(1.0, 1.0 / (2.0 * m_bound)) if m_bound > 0 else 1.0
    c2 = (instance.dim - 2) * m_bound
    analytic = {
        "linear_branch": 1.0 / c1 >= 2.0 * m_bound,
        "cubic_branch": c1 <= 1.0 and 1.0 / c1 >= 2.0 * m_bound,
        "G_bounded": True,
    }

    phi = np.asarray(instance.phi(theta_grid), dtype=float)
    psi = np.asarray(psi_eval(t_grid))
    f_abs = np.abs(psi[None, :] - 2.0 * phi[:, None])
    lower = f_abs - (c1 * np.abs(t_grid)[None, :] ** DELTA_ONE - 1.0 / c1)
    upper = c2 * (1.0 + f_abs) ** DELTA_TWO - np.abs((instance.dim - 2) * phi)[:, None]

    witness = None
    if lower.min() < 0.0 or upper.min() < 0.0:
        grid = lower if lower.min() < upper.min() else upper
        i, j = np.unravel_index(int(np.argmin(grid)), grid.shape)
        witness = {
            "theta": theta_grid[i].tolist(),
            "t": float(t_grid[j]),
            "slack": float(grid[i, j]),
        }
    return GrowthCertificate(
        c1=c1,
        c2=c2,
        delta1=DELTA_ONE,
        delta2=DELTA_TWO,
        sup_bound=m_bound,
        analytic=analytic,
        lower_slack=float(lower.min()),
        upper_slack=float(upper.min()),
        witness=witness,
    )


def outer_dirichlet_data(instance: TransmissionInstance) -> List[Tuple[int, float]]:
    """Coefficients (k, -rho a_k 2^{2-n-k}) of h on 2S^{n-1} in the harmonics Y_k."""
    n = instance.dim
    return [
        (term.degree, -instance.rho * term.coefficient * OUTER_RADIUS ** (2 - n - term.degree))
        for term in instance.inner.terms
    ]


def h_eval(instance: TransmissionInstance, x: Any):
    """h(x) = -sum_k rho a_k 2^{2-n-k} Y_k(x/2) for x on 2S^{n-1}.

    Raises:
        DomainError: If a point is not on the sphere of radius 2.
    """
    points, single = as_points(x, instance.dim)
    radii = np.linalg.norm(points, axis=1)
    if np.any(np.abs(radii - OUTER_RADIUS) > 1e-10):
        raise DomainError("h is defined on the sphere of radius 2 only.")
    directions = points / radii[:, None]
    values = np.zeros(points.shape[0])
    for (k, coefficient), term in zip(outer_dirichlet_data(instance), instance.inner.terms):
        values += coefficient * term.harmonic(directions)
    return float(values[0]) if single else values


def classical_jump(u_o: BallSeries, u_i: BallSeries, theta: Any):
    """d_r u^o - d_r u^i on S^{n-1} from the analytic radial derivatives."""
    return np.asarray(u_o.radial_derivative(theta)) - np.asarray(u_i.radial_derivative(theta))


@dataclass
class ConditionCheck:
    """One pass/fail entry of a verification report."""

    name: str
    residual: float
    tolerance: float
    passed: bool
    witnesses: List[Dict[str, Any]] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready entry."""
        return {
            "name": self.name,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "witnesses": self.witnesses,
            **({"details": self.details} if self.details else {}),
        }


@dataclass
class Condition3Report:
    """Hölder exponents of Phi, of N_G u and of the inverse applied to Hölder data."""

    alpha: float
    checks: List[ConditionCheck]
    constants_preserved: bool

    @property
    def passed(self) -> bool:
        """True when every fitted exponent clears alpha - 0.05."""
        return self.constants_preserved and all(c.passed for c in self.checks)

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready report."""
        return {
            "alpha": self.alpha,
            "constants_preserved": self.constants_preserved,
            "checks": [c.to_dict() for c in self.checks],
            "pass": self.passed,
        }


def condition3_check(
    instance: TransmissionInstance,
    scales: Optional[List[float]] = None,
    sample_count: int = 10_000,
    seed: int = 0,
    margin: float = 0.05,
) -> Condition3Report:
    """Empirical check that Phi, N_G and (I + N_F)^-1 preserve C^{0,alpha}.

    Phi is followed along the great circle, where it is a Weierstrass series. N_G only
    depends on Phi, and the inverse is applied to g = 0, i.e. t = (id + Psi)^-1(2 Phi).

    Raises:
        IncompatibleVariantError: If the instance is not the ``holder`` example.
    """
    from rough_harmonics.regularity import holder_modulus
    from rough_harmonics.weierstrass import lift_as_lacunary

    if instance.variant is not TransmissionVariant.HOLDER:
        raise IncompatibleVariantError("The Hölder condition applies to the holder example.")
    alpha = float(instance.alpha)
    lift = lift_as_lacunary(instance.inner)
    lift = lift.with_terms(lift.max_terms)
    threshold = alpha - margin
    n = instance.dim

    def g_lift(t: np.ndarray) -> np.ndarray:
        return (n - 2) * lift(t)

    def inverse_lift(t: np.ndarray) -> np.ndarray:
        return solve_id_plus_psi(2.0 * lift(t))

    checks = []
    functions = (("phi", lift), ("nemytskii_G", g_lift), ("inverse_I_plus_F", inverse_lift))
    for name, function in functions:
        if name == "nemytskii_G" and n == 2:
            checks.append(
                ConditionCheck(name, math.inf, threshold, True, details={"constant": True})
            )
            continue
        table = holder_modulus(function, scales, sample_count, seed)
        checks.append(
            ConditionCheck(
                name,
                table.slope,
                threshold,
                table.slope >= threshold,
                details={"r_squared": table.r_squared},
            )
        )

    grid = default_theta_grid(n, 64, seed)
    g_low = F_G_eval(instance, grid, -5.0)[1]
    g_high = F_G_eval(instance, grid, 5.0)[1]
    return Condition3Report(alpha, checks, bool(np.array_equal(g_low, g_high)))
