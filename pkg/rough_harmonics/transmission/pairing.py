"""Weak normal-jump pairing of a transmission pair against bump test functions.

For a test function phi supported in Omega = 2B the pairing is

    int_{S} (w^o - w^i) d_nu phi + int_{1<|x|<2} w^o Lap phi + int_{|x|<1} w^i Lap phi,

which equals int_S (d_r w^o - d_r w^i) phi for smooth harmonic pieces.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from rough_harmonics.exceptions import SupportError, UnsupportedDimensionError
from rough_harmonics.series import BallSeries
from rough_harmonics.sphere import (
    AnnulusRule,
    QuadratureRule,
    as_points,
    build_annulus_rule,
    build_cap_quadrature,
    build_sphere_quadrature,
    graded_breakpoints,
    random_sphere_points,
)

logger = logging.getLogger(__name__)

OUTER_RADIUS = 2.0
DEFAULT_BUMP_RADIUS = 0.25
RADIAL_ORDER = 64
# Points with s above this have phi and every derivative below the float range.
_SUPPORT_CUTOFF = 1.0 - 1e-3


@dataclass(frozen=True, eq=False)
class BumpTestFunction:
    """phi(x) = exp(1 - 1/(1 - s)) with s = |x - c|^2 / r^2, zero for s >= 1.

    Attributes:
        center: Center c, shape (n,).
        radius: Support radius r.
    """

    center: np.ndarray = field(repr=False)
    radius: float

    def __post_init__(self) -> None:
        center = np.asarray(self.center, dtype=float)
        object.__setattr__(self, "center", center)
        if not self.radius > 0.0:
            raise SupportError(f"Bump radius must be positive, got {self.radius}.")
        if np.linalg.norm(center) + self.radius >= OUTER_RADIUS:
            raise SupportError(
                f"Bump at |c|={np.linalg.norm(center):.6g} with radius {self.radius} "
                f"reaches the outer boundary |x| = {OUTER_RADIUS}."
            )

    @property
    def dim(self) -> int:
        """Ambient dimension."""
        return int(self.center.size)

    def _profile(self, x: Any) -> Tuple[np.ndarray, np.ndarray, np.ndarray, bool]:
        points, single = as_points(x, self.dim)
        offsets = points - self.center
        s = np.sum(offsets**2, axis=1) / self.radius**2
        inside = s < _SUPPORT_CUTOFF
        phi = np.zeros(s.size)
        phi[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside]))
        return offsets, s, phi, single

    def __call__(self, x: Any):
        _, _, phi, single = self._profile(x)
        return float(phi[0]) if single else phi

    def gradient(self, x: Any) -> np.ndarray:
        """-2 phi (x - c) / (r^2 (1 - s)^2)."""
        offsets, s, phi, single = self._profile(x)
        factor = np.zeros_like(phi)
        inside = phi > 0.0
        factor[inside] = -2.0 * phi[inside] / (self.radius**2 * (1.0 - s[inside]) ** 2)
        result = factor[:, None] * offsets
        return result[0] if single else result

    def laplacian(self, x: Any):
        """phi (4 s (2s - 1) / (1-s)^4 - 2n / (1-s)^2) / r^2."""
        _, s, phi, single = self._profile(x)
        result = np.zeros_like(phi)
        inside = phi > 0.0
        si = s[inside]
        result[inside] = (
            phi[inside]
            * (4.0 * si * (2.0 * si - 1.0) / (1.0 - si) ** 4 - 2.0 * self.dim / (1.0 - si) ** 2)
            / self.radius**2
        )
        return float(result[0]) if single else result

    def radial_extent(self) -> Tuple[float, float]:
        """Smallest and largest |x| over the support."""
        distance = float(np.linalg.norm(self.center))
        return max(0.0, distance - self.radius), distance + self.radius

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready description."""
        return {"center": self.center.tolist(), "radius": self.radius}


def _fibonacci_sphere(count: int) -> np.ndarray:
    i = np.arange(count) + 0.5
    z = 1.0 - 2.0 * i / count
    azimuth = math.pi * (1.0 + math.sqrt(5.0)) * i
    rho = np.sqrt(1.0 - z**2)
    return np.column_stack([rho * np.cos(azimuth), rho * np.sin(azimuth), z])


def default_bumps(
    n: int, count: int = 5, radius: float = DEFAULT_BUMP_RADIUS
) -> List[BumpTestFunction]:
    """Bumps of radius 1/4 centered on S^{n-1}, straddling the interface.

    Centers are equally spaced on the circle for n=2, a Fibonacci lattice for n=3, and a
    seeded uniform sample otherwise.
    """
    if n == 2:
        angles = 2.0 * np.pi * np.arange(count) / count + 0.3
        centers = np.column_stack([np.cos(angles), np.sin(angles)])
    elif n == 3:
        centers = _fibonacci_sphere(count)
    else:
        centers = random_sphere_points(n, count, seed=0)
    return [BumpTestFunction(center, radius) for center in centers]


@dataclass(frozen=True, eq=False)
class PairingRules:
    """Quadrature for one bump: interface rule and optional inner and outer volume rules."""

    interface: QuadratureRule
    inner: Optional[AnnulusRule]
    outer: Optional[AnnulusRule]
    embedded: Optional[QuadratureRule] = None


def _panel_breakpoints(
    lo: float, hi: float, grade_at_one: bool, finest: float, widest: float
) -> Tuple[float, ...]:
    if grade_at_one:
        edges = list(graded_breakpoints(lo, hi, 1.0, finest))
    else:
        edges = [lo, hi]
    refined = [edges[0]]
    for a, b in zip(edges[:-1], edges[1:]):
        pieces = max(1, int(math.ceil((b - a) / widest)))
        refined.extend(a + (b - a) * np.arange(1, pieces + 1) / pieces)
    return tuple(float(e) for e in refined)


def _angular_rule(bump: BumpTestFunction, max_degree: int, shrink: float = 1.0) -> QuadratureRule:
    n = bump.dim
    distance = float(np.linalg.norm(bump.center))
    bandwidth = max(max_degree, 1)
    if distance <= bump.radius:
        resolution = int(shrink * (2 * bandwidth + 64))
        return build_sphere_quadrature(n, resolution)
    half_angle = math.asin(bump.radius / distance)
    polar_order = int(math.ceil(shrink * (0.6 * bandwidth * half_angle + 48)))
    azimuth_count = int(math.ceil(2 * bandwidth * math.sin(half_angle))) + 64
    return build_cap_quadrature(n, bump.center, half_angle, polar_order, azimuth_count)


def pairing_rules(bump: BumpTestFunction, max_degree: int) -> PairingRules:
    """Quadrature adapted to the bump support and the series bandwidth.

    The angular rule is a cap of half-angle arcsin(r/|c|) around the bump center, or the
    whole sphere if the support contains the origin. Radial panels carry 24 Gauss nodes,
    are at most r/8 wide, and halve toward |x| = 1 down to 1/(8 K) because the terms
    r^{+-k} vary on that scale. For n=2, where there is no azimuth to halve, a second arc
    rule with three quarters of the polar nodes provides the angular error estimate.

    Raises:
        UnsupportedDimensionError: For n outside {2, 3}.
    """
    n = bump.dim
    if n not in (2, 3):
        raise UnsupportedDimensionError(f"Weak pairings need n in {{2, 3}}, got {n}.")
    angular = _angular_rule(bump, max_degree)
    embedded = _angular_rule(bump, max_degree, shrink=0.75) if n == 2 else None
    finest = 1.0 / (8.0 * max(max_degree, 1))
    widest = bump.radius / 8.0
    lo, hi = bump.radial_extent()

    inner = None
    if lo < 1.0:
        top = min(1.0, hi)
        edges = _panel_breakpoints(lo, top, top == 1.0, finest, widest)
        inner = build_annulus_rule(n, lo, top, RADIAL_ORDER, angular, breakpoints=edges)
    outer = None
    if hi > 1.0:
        bottom = max(1.0, lo)
        edges = _panel_breakpoints(bottom, hi, bottom == 1.0, finest, widest)
        outer = build_annulus_rule(n, bottom, hi, RADIAL_ORDER, angular, breakpoints=edges)
    return PairingRules(angular, inner, outer, embedded)


@dataclass
class PairingResult:
    """Weak pairing, its pieces, the classical reference and error estimates.

    Attributes:
        value: The weak pairing.
        interface: Interface term.
        outer: Volume term over 1 < |x| < 2.
        inner: Volume term over |x| < 1.
        classical: int_S (d_r w^o - d_r w^i) phi.
        error_estimate: Embedded-rule differences, angular plus radial.
        norms: L1 norms of d_nu phi on S, Lap phi on Omega and phi on S.
    """

    value: float
    interface: float
    outer: float
    inner: float
    classical: float
    error_estimate: float
    norms: Dict[str, float]

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready summary."""
        return dict(self.__dict__)


def _shell_integrals(
    series: BallSeries,
    bump: BumpTestFunction,
    nodes: np.ndarray,
    angular_values: np.ndarray,
    radial_nodes: np.ndarray,
    radial_weights: np.ndarray,
    weight_sets: np.ndarray,
) -> Tuple[np.ndarray, float]:
    """Integrate w Lap(phi) shell by shell with u(r theta) = R(r) @ Y(theta).

    Returns one integral per row of ``weight_sets`` and the L1 norm of Lap(phi).
    """
    totals = np.zeros(weight_sets.shape[0])
    l1 = 0.0
    n = series.dim
    for r, w in zip(radial_nodes, radial_weights):
        laplacian = bump.laplacian(r * nodes)
        if not np.any(laplacian):
            continue
        values = (series.radial_factors(float(r)) @ angular_values) * laplacian
        measure = w * r ** (n - 1)
        totals += measure * (weight_sets @ values)
        l1 += measure * float(np.abs(laplacian) @ weight_sets[0])
    return totals, l1


def _assemble(
    u_o: BallSeries,
    u_i: BallSeries,
    bump: BumpTestFunction,
    rules: PairingRules,
    angular: QuadratureRule,
    radial: str = "full",
) -> Tuple[Dict[str, np.ndarray], Dict[str, float]]:
    nodes = angular.nodes
    angular_values = u_i.angular_matrix(nodes)
    half = angular.half_azimuth_weights()
    weight_sets = angular.weights[None, :] if half is None else np.vstack([angular.weights, half])

    trace_jump = (u_o.radial_factors(1.0) - u_i.radial_factors(1.0)) @ angular_values
    flux_jump = (
        u_o.radial_derivative_factors(1.0) - u_i.radial_derivative_factors(1.0)
    ) @ angular_values
    normal_derivative = np.sum(bump.gradient(nodes) * nodes, axis=1)
    phi = bump(nodes)

    pieces = {
        "interface": weight_sets @ (trace_jump * normal_derivative),
        "classical": weight_sets @ (flux_jump * phi),
    }
    norms = {
        "normal_derivative_l1": float(np.abs(normal_derivative) @ angular.weights),
        "phi_l1": float(np.abs(phi) @ angular.weights),
        "laplacian_l1": 0.0,
    }
    for name, series, rule in (("outer", u_o, rules.outer), ("inner", u_i, rules.inner)):
        if rule is None:
            pieces[name] = np.zeros(weight_sets.shape[0])
            continue
        if radial == "coarse":
            rule = rule.coarsened()
        pieces[name], l1 = _shell_integrals(
            series, bump, nodes, angular_values, rule.radial_nodes, rule.radial_weights, weight_sets
        )
        norms["laplacian_l1"] += l1
    return pieces, norms


def weak_jump_pairing(
    u_o: BallSeries,
    u_i: BallSeries,
    bump: BumpTestFunction,
    rules: Optional[PairingRules] = None,
) -> PairingResult:
    """Evaluate the weak normal-jump pairing of (u_o, u_i) against ``bump``.

    Both series must share their harmonics (as a series and its Kelvin transform do), so
    one angular matrix serves the trace, the interface and every shell.

    Raises:
        SupportError: If the bump reaches the outer boundary.
        UnsupportedDimensionError: For n outside {2, 3}.
    """
    if u_o.dim != bump.dim or u_i.dim != bump.dim:
        raise UnsupportedDimensionError("Series and bump dimensions differ.")
    _, hi = bump.radial_extent()
    if hi >= OUTER_RADIUS:
        raise SupportError("The bump support must stay inside the radius-2 ball.")
    if rules is None:
        rules = pairing_rules(bump, max(u_o.max_degree, u_i.max_degree))

    pieces, norms = _assemble(u_o, u_i, bump, rules, rules.interface)
    interface = float(pieces["interface"][0])
    outer = float(pieces["outer"][0])
    inner = float(pieces["inner"][0])
    value = interface + outer + inner

    if pieces["interface"].size > 1:
        embedded_value = float(sum(pieces[k][1] for k in ("interface", "outer", "inner")))
    else:
        other, _ = _assemble(u_o, u_i, bump, rules, rules.embedded)
        embedded_value = float(sum(other[k][0] for k in ("interface", "outer", "inner")))
    coarse, _ = _assemble(u_o, u_i, bump, rules, rules.interface, radial="coarse")
    coarse_value = float(sum(coarse[k][0] for k in ("interface", "outer", "inner")))
    error = abs(value - embedded_value) + abs(value - coarse_value)

    logger.debug(
        "Pairing at c=%s: %.12g (interface %.6g, outer %.6g, inner %.6g, err %.3g).",
        np.round(bump.center, 4).tolist(),
        value,
        interface,
        outer,
        inner,
        error,
    )
    return PairingResult(
        value=value,
        interface=interface,
        outer=outer,
        inner=inner,
        classical=float(pieces["classical"][0]),
        error_estimate=error,
        norms=norms,
    )


def surface_integral(
    function: Any, bump: BumpTestFunction, rules: PairingRules
) -> float:
    """int_S f phi dsigma on the interface rule, for a vectorized f of unit directions."""
    nodes = rules.interface.nodes
    return float(rules.interface.integrate(np.asarray(function(nodes)) * bump(nodes)))


def tail_budget(
    result: PairingResult, u_o: BallSeries, u_i: BallSeries, n: int
) -> float:
    """Bound on the pairing change caused by the omitted terms of both series."""
    tail = max(u_o.tail_bound(1.0), u_i.tail_bound(1.0))
    norms = result.norms
    return tail * (
        2.0 * norms["normal_derivative_l1"]
        + norms["laplacian_l1"]
        + (n - 2) * norms["phi_l1"]
    )


def bump_grid(bumps: Sequence[BumpTestFunction]) -> List[Dict[str, Any]]:
    """JSON descriptions of a bump family."""
    return [bump.to_dict() for bump in bumps]
