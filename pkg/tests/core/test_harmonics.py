"""Spherical harmonics: counts, explicit families, bases and sup norms."""

import math

import numpy as np
import pytest

from rough_harmonics.exceptions import (
    DomainError,
    HarmonicOverflowError,
    UnsupportedDimensionError,
)
from rough_harmonics.harmonics import (
    HarmonicKind,
    estimate_sup_norm,
    gegenbauer,
    harmonic_dimension,
    highest_weight_eval,
    highest_weight_harmonic,
    highest_weight_l2_norm,
    laplace_beltrami_eigenvalue,
    legendre_table,
    orthonormal_basis,
    random_unit_harmonic,
    sup_norm_bound,
    zonal_eval,
    zonal_harmonic,
)
from rough_harmonics.sphere import (
    SpherePoint,
    build_sphere_quadrature,
    random_sphere_points,
    sphere_surface_area,
)


@pytest.mark.parametrize(
    "n,k,expected",
    [(2, 0, 1), (2, 7, 2), (3, 0, 1), (3, 4, 9), (4, 3, 16), (5, 2, 14)],
)
def test_harmonic_dimension(n, k, expected):
    assert harmonic_dimension(n, k) == expected


def test_harmonic_dimension_errors():
    with pytest.raises(DomainError):
        harmonic_dimension(1, 2)
    with pytest.raises(DomainError):
        harmonic_dimension(3, -1)
    with pytest.raises(HarmonicOverflowError):
        harmonic_dimension(100, 10**6)


def test_laplace_beltrami_eigenvalue():
    assert laplace_beltrami_eigenvalue(3, 4) == 20.0
    assert laplace_beltrami_eigenvalue(2, 5) == 25.0
    assert laplace_beltrami_eigenvalue(5, 0) == 0.0


def test_highest_weight_values():
    assert highest_weight_eval(3, 10, SpherePoint.pole(3)) == pytest.approx(1.0)
    theta = np.array([[math.cos(0.4), math.sin(0.4)]])
    assert highest_weight_eval(2, 3, theta)[0] == pytest.approx(math.cos(1.2))
    # Q_k vanishes where theta_1 = theta_2 = 0.
    assert highest_weight_eval(3, 2, [0.0, 0.0, 1.0]) == pytest.approx(0.0)


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("k", [1, 2, 3, 4, 8, 17, 33, 64])
def test_highest_weight_l2_norm_matches_quadrature(n, k):
    rule = build_sphere_quadrature(n, 2 * k + 2)
    harmonic = highest_weight_harmonic(n, k)
    measured = math.sqrt(rule.integrate(harmonic(rule.nodes) ** 2))
    assert highest_weight_l2_norm(n, k) == pytest.approx(measured, rel=1e-10)
    assert harmonic.l2_norm == pytest.approx(measured, rel=1e-10)


def test_highest_weight_gradient():
    gradient = highest_weight_harmonic(2, 2).gradient([0.3, 0.4])
    assert gradient == pytest.approx([0.6, -0.8])


@pytest.mark.parametrize("n,k", [(2, 3), (3, 0), (3, 3)])
def test_orthonormal_basis_gram_matrix(n, k):
    rule = build_sphere_quadrature(n, 2 * k + 2)
    values = np.vstack([y(rule.nodes) for y in orthonormal_basis(n, k)])
    gram = (values * rule.weights) @ values.T
    assert gram == pytest.approx(np.eye(harmonic_dimension(n, k)), abs=1e-12)


@pytest.mark.parametrize("n", [2, 3])
def test_bases_up_to_degree_ten_are_jointly_orthonormal(n):
    rule = build_sphere_quadrature(n, 24)
    values = np.vstack(
        [y(rule.nodes) for k in range(11) for y in orthonormal_basis(n, k)]
    )
    gram = (values * rule.weights) @ values.T
    size = sum(harmonic_dimension(n, k) for k in range(11))
    assert gram.shape == (size, size)
    assert np.max(np.abs(gram - np.eye(size))) <= 1e-10


def test_orthonormal_basis_needs_small_dimension():
    with pytest.raises(UnsupportedDimensionError):
        orthonormal_basis(4, 2)


def test_random_unit_harmonic_is_seeded_and_normalized():
    first = random_unit_harmonic(3, 6, seed=11)
    second = random_unit_harmonic(3, 6, seed=11)
    other = random_unit_harmonic(3, 6, seed=12)
    rule = build_sphere_quadrature(3, 14)
    assert np.array_equal(first(rule.nodes), second(rule.nodes))
    assert not np.allclose(first(rule.nodes), other(rule.nodes))
    assert rule.integrate(first(rule.nodes) ** 2) == pytest.approx(1.0, rel=1e-12)
    assert first.kind is HarmonicKind.RANDOM


def test_random_unit_harmonic_grid_matches_pointwise():
    harmonic = random_unit_harmonic(3, 5, seed=4)
    polar = np.array([0.3, 1.2, 2.5])
    azimuths = np.array([0.0, 1.0, 4.0])
    grid = harmonic.evaluate_grid(polar, azimuths)
    point = [
        math.sin(1.2) * math.cos(4.0),
        math.sin(1.2) * math.sin(4.0),
        math.cos(1.2),
    ]
    assert grid[1, 2] == pytest.approx(harmonic(point), rel=1e-12)


def test_zonal_harmonic_pole_value_and_norm():
    n, k = 3, 2
    harmonic = zonal_harmonic(n, k)
    at_pole = harmonic(SpherePoint.pole(3))
    assert at_pole == pytest.approx(math.sqrt(5 / (4 * math.pi)), rel=1e-12)
    assert sup_norm_bound(n, k, HarmonicKind.ZONAL) == pytest.approx(at_pole, rel=1e-12)

    rule = build_sphere_quadrature(3, 6)
    assert rule.integrate(harmonic(rule.nodes) ** 2) == pytest.approx(1.0, rel=1e-12)


def test_zonal_eval_depends_on_the_angle_to_the_pole():
    pole = SpherePoint.from_vector([0.0, 0.0, 1.0])
    theta = [0.6, 0.0, 0.8]
    # Z_2 is proportional to the Legendre polynomial P_2 of the angle cosine.
    expected = math.sqrt(5 / (4 * math.pi)) * (3 * 0.8**2 - 1) / 2
    assert zonal_eval(3, 2, pole, theta) == pytest.approx(expected, rel=1e-12)
    assert zonal_eval(3, 2, pole, [0.0, 0.6, 0.8]) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(DomainError):
        zonal_eval(3, 2, SpherePoint.pole(2), theta)


def test_gegenbauer_recurrence():
    x = np.array([-0.5, 0.0, 0.7])
    assert gegenbauer(2, 1.0, x) == pytest.approx(4 * x**2 - 1)
    with pytest.raises(HarmonicOverflowError):
        gegenbauer(2**14 + 1, 0.5, x)


def test_sup_norm_bound():
    assert sup_norm_bound(5, 100, HarmonicKind.HIGHEST_WEIGHT) == 1.0
    assert sup_norm_bound(2, 4, HarmonicKind.RANDOM) == pytest.approx(1 / math.sqrt(math.pi))
    assert sup_norm_bound(3, 4, HarmonicKind.RANDOM) == pytest.approx(
        math.sqrt(9 / sphere_surface_area(3))
    )


def test_estimate_sup_norm():
    estimate = estimate_sup_norm(highest_weight_harmonic(2, 5))
    assert estimate.value == pytest.approx(1.0)
    assert estimate.spacing == pytest.approx(2 * math.pi / 2**16)

    harmonic = random_unit_harmonic(3, 8, seed=0)
    estimate = estimate_sup_norm(harmonic, resolution=64)
    assert 0.0 < estimate.value <= harmonic.sup_norm_bound
    assert estimate.points == 64 * 64


@pytest.mark.parametrize("n", [3, 4, 5])
def test_dimension_growth(n):
    ratios = [harmonic_dimension(n, k) / k ** (n - 2) for k in (2**10, 2**12, 2**20)]
    assert ratios[1] == pytest.approx(ratios[0], rel=0.05)
    assert ratios[2] == pytest.approx(2 / math.factorial(n - 2), rel=1e-4)


def _addition_bound(n, k):
    return math.sqrt(harmonic_dimension(n, k) / sphere_surface_area(n))


@pytest.mark.parametrize(
    "harmonic",
    [
        random_unit_harmonic(2, 5, seed=1),
        random_unit_harmonic(3, 1, seed=2),
        random_unit_harmonic(3, 8, seed=3),
        random_unit_harmonic(3, 64, seed=4),
        zonal_harmonic(3, 6),
        zonal_harmonic(4, 6),
        *orthonormal_basis(3, 4),
    ],
    ids=lambda h: f"{h.kind}-n{h.dim}-k{h.degree}-{h.index}",
)
def test_unit_harmonics_respect_the_sup_norm_bound(harmonic):
    estimate = estimate_sup_norm(harmonic, resolution=128 if harmonic.dim == 3 else None)
    assert estimate.value <= _addition_bound(harmonic.dim, harmonic.degree) + 1e-6


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_normalized_highest_weight_respects_the_sup_norm_bound(n):
    for k in range(1, 65):
        # sup |Q_k| = 1, so the normalized sup is 1 / ||Q_k||_2.
        assert 1.0 / highest_weight_l2_norm(n, k) <= _addition_bound(n, k) + 1e-6


def test_legendre_tables_keep_the_addition_theorem_at_high_degree():
    k = 4096
    x = np.array([-0.999999, -0.3, 0.0, 0.74, 0.99, 1.0])
    table = legendre_table(k, x)
    assert np.all(np.isfinite(table))
    # sum over m of |Y_k^m|^2 is (2k + 1) / (4 pi), i.e. P_0^2 + 2 sum P_m^2 = k + 1/2.
    totals = table[0] ** 2 + 2.0 * np.sum(table[1:] ** 2, axis=0)
    assert totals == pytest.approx(np.full(x.size, k + 0.5), rel=1e-8)


def test_random_harmonic_of_high_degree_stays_bounded():
    harmonic = random_unit_harmonic(3, 4096, seed=0)
    points = random_sphere_points(3, 6, seed=1)
    tilted = np.array([0.6726, 0.0, 0.74])
    points = np.vstack([points, tilted / np.linalg.norm(tilted)])
    values = harmonic(points)
    assert np.all(np.isfinite(values))
    assert np.max(np.abs(values)) <= harmonic.sup_norm_bound
