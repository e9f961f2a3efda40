"""Geometry of the unit ball and sphere, and quadrature rules on them.

Product rules are tensor rules: Gauss-Legendre nodes in the polar cosine times a uniform
azimuth grid. They are laid out polar-major, so ``nodes.reshape(polar, azimuth, n)`` recovers
the tensor structure; this is what allows half-azimuth error estimates without re-evaluating
integrands.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Sequence, Tuple, Union

import numpy as np
from memoization import cached
from scipy.special import gammaln, roots_legendre

from rough_harmonics.exceptions import DomainError, UnsupportedDimensionError

logger = logging.getLogger(__name__)

_NORM_FLOOR = 1e-300

PointLike = Union["SpherePoint", Sequence[float], np.ndarray]


@dataclass(frozen=True)
class SpherePoint:
    """A point of S^{n-1}, stored as a normalized coordinate tuple."""

    coords: Tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.coords) < 2:
            raise DomainError("Sphere points need at least two coordinates.")
        norm = math.sqrt(math.fsum(c * c for c in self.coords))
        if abs(norm - 1.0) > 1e-12:
            raise DomainError(
                f"Coordinates have norm {norm!r}; use SpherePoint.from_vector()."
            )

    @classmethod
    def from_vector(cls, vector: Sequence[float]) -> "SpherePoint":
        """Normalize a nonzero vector onto the sphere.

        Args:
            vector: Any vector with at least two entries.

        Returns:
            The normalized point.

        Raises:
            DomainError: If the vector norm is below 1e-300.
        """
        values = [float(v) for v in vector]
        norm = math.sqrt(math.fsum(v * v for v in values))
        if not norm >= _NORM_FLOOR:
            raise DomainError(f"Cannot normalize a vector of norm {norm!r}.")
        return cls(tuple(v / norm for v in values))

    @classmethod
    def pole(cls, n: int, axis: int = 0) -> "SpherePoint":
        """Return the coordinate unit vector e_{axis+1} of S^{n-1}."""
        coords = [0.0] * n
        coords[axis] = 1.0
        return cls(tuple(coords))

    @property
    def dim(self) -> int:
        """Dimension n of the ambient space."""
        return len(self.coords)

    def as_array(self) -> np.ndarray:
        """Return the coordinates as a float array of shape (n,)."""
        return np.asarray(self.coords, dtype=float)


def as_points(points: Union[PointLike, Sequence[PointLike]], n: Optional[int] = None):
    """Coerce one point or many points to a float array of shape (m, n).

    Returns:
        A pair ``(array, single)`` where ``single`` tells whether one point was given.

    Raises:
        DomainError: If the dimension does not match ``n``.
    """
    if isinstance(points, SpherePoint):
        array = points.as_array()[None, :]
        single = True
    elif isinstance(points, (list, tuple)) and points and isinstance(
        points[0], SpherePoint
    ):
        array = np.array([p.coords for p in points], dtype=float)
        single = False
    else:
        array = np.asarray(points, dtype=float)
        single = array.ndim == 1
        if single:
            array = array[None, :]
    if array.ndim != 2:
        raise DomainError(f"Expected points of shape (m, n), got {array.shape}.")
    if n is not None and array.shape[1] != n:
        raise DomainError(f"Expected points in R^{n}, got R^{array.shape[1]}.")
    return array, single


def unit_ball_volume(n: int) -> float:
    """Return the volume of the unit ball of R^n, pi^{n/2} / Gamma(n/2 + 1).

    Raises:
        DomainError: If n < 1.
    """
    if n < 1:
        raise DomainError(f"Ball dimension must be at least 1, got {n}.")
    return math.exp(0.5 * n * math.log(math.pi) - gammaln(0.5 * n + 1.0))


def sphere_surface_area(n: int) -> float:
    """Return the surface measure of S^{n-1}, which is n times the ball volume."""
    if n < 2:
        raise DomainError(f"Sphere dimension must be at least 2, got {n}.")
    return n * unit_ball_volume(n)


@cached(max_size=256)
def gauss_legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Return read-only Gauss-Legendre nodes and weights on [-1, 1]."""
    if order < 1:
        raise DomainError(f"Gauss-Legendre order must be positive, got {order}.")
    nodes, weights = roots_legendre(order)
    nodes = np.asarray(nodes, dtype=float)
    weights = np.asarray(weights, dtype=float)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Weighted nodes on the sphere, or on a cap of it.

    Attributes:
        dim: Ambient dimension n.
        nodes: Node coordinates, shape (m, n).
        weights: Positive weights in surface-measure units, shape (m,).
        degree: Polynomial exactness; 0 means no exactness claim.
        mode: ``product``, ``monte_carlo`` or ``cap``.
        measure: Total measure of the covered region.
        layout: ``(polar, azimuth)`` tensor shape for product and cap rules.
    """

    dim: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    degree: int
    mode: str
    measure: float
    layout: Optional[Tuple[int, int]] = None

    def __post_init__(self) -> None:
        if self.nodes.shape != (self.weights.size, self.dim):
            raise DomainError("Quadrature nodes and weights do not match.")
        if not np.all(self.weights > 0):
            raise DomainError("Quadrature weights must be positive.")
        total = float(np.sum(self.weights))
        if abs(total - self.measure) > 1e-10 * self.measure:
            raise DomainError(
                f"Weights sum to {total!r}, expected measure {self.measure!r}."
            )

    @property
    def size(self) -> int:
        """Number of nodes."""
        return int(self.weights.size)

    def integrate(self, integrand: Union[np.ndarray, Callable[[np.ndarray], np.ndarray]]):
        """Integrate values at the nodes, or a vectorized function of the nodes."""
        values = integrand(self.nodes) if callable(integrand) else integrand
        return np.tensordot(np.asarray(values), self.weights, axes=([-1], [0]))

    def sphere_points(self) -> Iterator[SpherePoint]:
        """Iterate over the nodes as SpherePoint objects."""
        for row in self.nodes:
            yield SpherePoint.from_vector(row)

    def half_azimuth_weights(self) -> Optional[np.ndarray]:
        """Weights of the embedded rule using every other azimuth node.

        The embedded rule reuses the integrand values at the kept nodes and zero weights
        elsewhere; its difference to the full rule is an error estimate.

        Returns:
            The embedded weights, or None if the rule has no even azimuth layout.
        """
        if self.layout is None or self.layout[1] % 2:
            return None
        polar, azimuth = self.layout
        grid = self.weights.reshape(polar, azimuth).copy()
        grid[:, 1::2] = 0.0
        grid[:, 0::2] *= 2.0
        return grid.reshape(-1)


def _even_azimuth_count(minimum: int) -> int:
    return minimum + (minimum % 2)


@cached(max_size=128)
def _product_rule(n: int, resolution: int) -> QuadratureRule:
    azimuth = _even_azimuth_count(resolution + 1)
    angles = 2.0 * np.pi * np.arange(azimuth) / azimuth
    if n == 2:
        nodes = np.column_stack([np.cos(angles), np.sin(angles)])
        weights = np.full(azimuth, 2.0 * np.pi / azimuth)
        layout = (1, azimuth)
    else:
        polar = resolution // 2 + 1
        cosines, gauss_weights = gauss_legendre(polar)
        sines = np.sqrt(1.0 - cosines**2)
        nodes = np.stack(
            [
                np.outer(sines, np.cos(angles)),
                np.outer(sines, np.sin(angles)),
                np.repeat(cosines[:, None], azimuth, axis=1),
            ],
            axis=-1,
        ).reshape(-1, 3)
        weights = np.outer(gauss_weights, np.full(azimuth, 2.0 * np.pi / azimuth))
        weights = weights.reshape(-1)
        layout = (polar, azimuth)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(
        dim=n,
        nodes=nodes,
        weights=weights,
        degree=resolution,
        mode="product",
        measure=sphere_surface_area(n),
        layout=layout,
    )


def build_sphere_quadrature(
    n: int,
    resolution: int,
    mode: str = "product",
    seed: Optional[int] = None,
) -> QuadratureRule:
    """Build a quadrature rule on S^{n-1}.

    Product rules (n in {2, 3}) are exact for spherical polynomials of degree at most
    ``resolution``. Monte Carlo rules draw ``resolution`` uniform samples with equal
    weights and make no exactness claim.

    Args:
        n: Ambient dimension, at least 2.
        resolution: Exactness degree (product) or sample count (monte_carlo).
        mode: ``product`` or ``monte_carlo``.
        seed: Seed for Monte Carlo sampling.

    Returns:
        The quadrature rule.

    Raises:
        DomainError: On invalid dimension, resolution or mode.
        UnsupportedDimensionError: For product rules with n >= 4.
    """
    if n < 2:
        raise DomainError(f"Sphere dimension must be at least 2, got {n}.")
    if resolution < 1:
        raise DomainError(f"Resolution must be at least 1, got {resolution}.")
    if mode == "product":
        if n > 3:
            raise UnsupportedDimensionError(
                f"Product quadrature is implemented for n in {{2, 3}}, got n={n}."
            )
        return _product_rule(n, resolution)
    if mode == "monte_carlo":
        nodes = random_sphere_points(n, resolution, seed)
        area = sphere_surface_area(n)
        return QuadratureRule(
            dim=n,
            nodes=nodes,
            weights=np.full(resolution, area / resolution),
            degree=0,
            mode="monte_carlo",
            measure=area,
        )
    raise DomainError(f"Unknown quadrature mode '{mode}'.")


def random_sphere_points(n: int, count: int, seed: Optional[int] = None) -> np.ndarray:
    """Draw ``count`` uniform points of S^{n-1} (normalized Gaussian vectors)."""
    rng = np.random.default_rng(seed)
    samples = rng.standard_normal((count, n))
    norms = np.linalg.norm(samples, axis=1)
    # Zero vectors have probability zero; redraw them if they occur.
    while np.any(norms < _NORM_FLOOR):
        bad = norms < _NORM_FLOOR
        samples[bad] = rng.standard_normal((int(bad.sum()), n))
        norms = np.linalg.norm(samples, axis=1)
    return samples / norms[:, None]


def random_ball_points(
    n: int, count: int, r_min: float, r_max: float, seed: Optional[int] = None
) -> np.ndarray:
    """Draw points with radius uniform in [r_min, r_max] and uniform direction."""
    rng = np.random.default_rng(seed)
    directions = random_sphere_points(n, count, int(rng.integers(2**31)))
    radii = rng.uniform(r_min, r_max, size=count)
    return directions * radii[:, None]


def random_rotation(n: int, seed: Optional[int] = None) -> np.ndarray:
    """Return a Haar-random rotation matrix of SO(n)."""
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def orthonormal_frame(axis: np.ndarray) -> np.ndarray:
    """Return an orthonormal basis of R^3 whose first vector is ``axis``."""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    helper = np.zeros(3)
    helper[int(np.argmin(np.abs(axis)))] = 1.0
    first = np.cross(axis, helper)
    first /= np.linalg.norm(first)
    second = np.cross(axis, first)
    return np.vstack([axis, first, second])


def build_cap_quadrature(
    n: int,
    axis: Sequence[float],
    half_angle: float,
    polar_order: int,
    azimuth_count: int,
) -> QuadratureRule:
    """Build a tensor rule on the spherical cap of given axis and angular radius.

    For n=2 the cap is the arc of half-width ``half_angle`` around ``axis`` and
    ``azimuth_count`` is ignored. For n=3 the rule uses Gauss-Legendre nodes in the
    polar angle (weighted by its sine) and a uniform azimuth grid around the axis.

    Raises:
        UnsupportedDimensionError: If n is not 2 or 3.
        DomainError: If the half angle is outside (0, pi].
    """
    if n not in (2, 3):
        raise UnsupportedDimensionError(f"Cap rules need n in {{2, 3}}, got {n}.")
    if not 0.0 < half_angle <= math.pi:
        raise DomainError(f"Cap half angle must lie in (0, pi], got {half_angle}.")

    axis_array = np.asarray(axis, dtype=float)
    axis_array = axis_array / np.linalg.norm(axis_array)
    gauss_nodes, gauss_weights = gauss_legendre(polar_order)

    if n == 2:
        offsets = half_angle * gauss_nodes
        center = math.atan2(axis_array[1], axis_array[0])
        nodes = np.column_stack([np.cos(center + offsets), np.sin(center + offsets)])
        weights = half_angle * gauss_weights
        return QuadratureRule(
            dim=2,
            nodes=nodes,
            weights=np.asarray(weights),
            degree=0,
            mode="cap",
            measure=2.0 * half_angle,
            layout=(polar_order, 1),
        )

    azimuth_count = _even_azimuth_count(max(azimuth_count, 2))
    polar_angles = 0.5 * half_angle * (gauss_nodes + 1.0)
    polar_weights = 0.5 * half_angle * gauss_weights * np.sin(polar_angles)
    azimuths = 2.0 * np.pi * np.arange(azimuth_count) / azimuth_count
    frame = orthonormal_frame(axis_array)
    local = np.stack(
        [
            np.repeat(np.cos(polar_angles)[:, None], azimuth_count, axis=1),
            np.outer(np.sin(polar_angles), np.cos(azimuths)),
            np.outer(np.sin(polar_angles), np.sin(azimuths)),
        ],
        axis=-1,
    ).reshape(-1, 3)
    nodes = local @ frame
    weights = np.outer(
        polar_weights, np.full(azimuth_count, 2.0 * np.pi / azimuth_count)
    ).reshape(-1)
    return QuadratureRule(
        dim=3,
        nodes=nodes,
        weights=weights,
        degree=0,
        mode="cap",
        measure=2.0 * np.pi * (1.0 - math.cos(half_angle)),
        layout=(polar_order, azimuth_count),
    )


@dataclass(frozen=True, eq=False)
class AnnulusRule:
    """Volume rule on {r_in <= |x| <= r_out} (restricted to a cap if the angular rule is).

    Radial nodes are composite Gauss-Legendre panels; the volume element r^{n-1} is
    applied by :meth:`integrate`, so ``radial_weights`` are plain dr weights.
    """

    dim: int
    inner_radius: float
    outer_radius: float
    radial_nodes: np.ndarray = field(repr=False)
    radial_weights: np.ndarray = field(repr=False)
    radial_order: int
    breakpoints: Tuple[float, ...]
    angular: QuadratureRule

    @property
    def volume(self) -> float:
        """Volume of the region covered by the rule."""
        radial = float(np.sum(self.radial_weights * self.radial_nodes ** (self.dim - 1)))
        return radial * self.angular.measure

    def integrate_radial(self, angular_integral: Callable[[float], float]) -> float:
        """Integrate given a callback that returns the angular integral at radius r."""
        total = 0.0
        for radius, weight in zip(self.radial_nodes, self.radial_weights):
            total += weight * radius ** (self.dim - 1) * angular_integral(float(radius))
        return total

    def integrate(self, integrand: Callable[[np.ndarray], np.ndarray]) -> float:
        """Integrate a vectorized function of points, one radial shell at a time."""
        return self.integrate_radial(
            lambda r: float(self.angular.integrate(integrand(r * self.angular.nodes)))
        )

    def coarsened(self) -> "AnnulusRule":
        """Return the same panels with half the Gauss order, for error estimates."""
        return build_annulus_rule(
            self.dim,
            self.inner_radius,
            self.outer_radius,
            max(1, self.radial_order // 2),
            self.angular,
            breakpoints=self.breakpoints,
        )


def graded_breakpoints(
    r_in: float, r_out: float, toward: float, finest_width: float
) -> Tuple[float, ...]:
    """Panel breakpoints on [r_in, r_out] halving in width toward one endpoint.

    Raises:
        DomainError: If ``toward`` is not an endpoint.
    """
    length = r_out - r_in
    if finest_width <= 0.0 or finest_width >= length:
        return (r_in, r_out)
    levels = int(math.ceil(math.log2(length / finest_width)))
    offsets = [length * 0.5**i for i in range(levels + 1)] + [0.0]
    if math.isclose(toward, r_out):
        points = [r_out - d for d in offsets]
    elif math.isclose(toward, r_in):
        points = [r_in + d for d in reversed(offsets)]
    else:
        raise DomainError(f"Grading target {toward} is not an endpoint.")
    return tuple(sorted(set(points)))


def build_annulus_rule(
    n: int,
    r_in: float,
    r_out: float,
    radial_order: int,
    angular: QuadratureRule,
    refine_toward: Optional[float] = None,
    finest_width: Optional[float] = None,
    breakpoints: Optional[Sequence[float]] = None,
) -> AnnulusRule:
    """Build a volume rule on the annulus r_in <= |x| <= r_out.

    Each radial panel carries ``radial_order`` Gauss-Legendre nodes. Panels are a single
    interval unless ``refine_toward`` names an endpoint, in which case their widths halve
    toward it down to ``finest_width``.

    Args:
        n: Ambient dimension.
        r_in: Inner radius, at least 0.
        r_out: Outer radius, above r_in.
        radial_order: Gauss order per panel.
        angular: The angular rule used on every shell.
        refine_toward: Optional endpoint where panels concentrate.
        finest_width: Width of the smallest panel when refining.
        breakpoints: Explicit panel breakpoints (overrides refinement).

    Returns:
        The annulus rule.

    Raises:
        DomainError: On inverted radii or mismatched dimensions.
    """
    if not 0.0 <= r_in < r_out:
        raise DomainError(f"Need 0 <= r_in < r_out, got r_in={r_in}, r_out={r_out}.")
    if angular.dim != n:
        raise DomainError(f"Angular rule lives in R^{angular.dim}, expected R^{n}.")
    if radial_order < 1:
        raise DomainError(f"Radial order must be positive, got {radial_order}.")

    if breakpoints is not None:
        edges = tuple(float(b) for b in breakpoints)
    elif refine_toward is not None:
        edges = graded_breakpoints(
            r_in, r_out, refine_toward, finest_width or (r_out - r_in) / 64.0
        )
    else:
        edges = (float(r_in), float(r_out))

    gauss_nodes, gauss_weights = gauss_legendre(radial_order)
    nodes, weights = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = 0.5 * (hi - lo)
        nodes.append(lo + half * (gauss_nodes + 1.0))
        weights.append(half * gauss_weights)

    return AnnulusRule(
        dim=n,
        inner_radius=float(r_in),
        outer_radius=float(r_out),
        radial_nodes=np.concatenate(nodes),
        radial_weights=np.concatenate(weights),
        radial_order=radial_order,
        breakpoints=edges,
        angular=angular,
    )
