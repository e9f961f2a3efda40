"""Ball series: schedules, evaluation, tails, Kelvin transforms and harmonicity."""

import logging
import math

import numpy as np
import pytest

from rough_harmonics.exceptions import (
    DomainError,
    IncompatibleVariantError,
    KelvinTransformError,
    SupportError,
)
from rough_harmonics.series import (
    BallSeries,
    CoefficientSchedule,
    ScheduleVariant,
    SeriesVariant,
    build_series,
    check_harmonic_fd,
    eval_ball_series,
    kelvin_transform,
    mean_value_check,
    schedule_coefficient,
)
from rough_harmonics.sphere import build_sphere_quadrature, random_ball_points, random_sphere_points


def test_schedule_support_and_coefficients():
    hadamard = CoefficientSchedule(ScheduleVariant.HADAMARD)
    assert hadamard.support(100) == [1, 4, 16, 64]
    assert hadamard.coefficient(16) == 0.25
    assert hadamard.coefficient(8) == 0.0

    inverse_square = CoefficientSchedule(ScheduleVariant.DYADIC_INVERSE_SQUARE, scale=2.0)
    assert inverse_square.support(20) == [2, 4, 8, 16]
    assert schedule_coefficient(inverse_square, 8) == pytest.approx(2.0 / 9.0)
    with pytest.raises(DomainError):
        schedule_coefficient(inverse_square, -1)


def test_schedule_tail_sums():
    holder = CoefficientSchedule(ScheduleVariant.DYADIC_HOLDER, alpha=0.5)
    assert holder.total() == pytest.approx(1.0 / (math.sqrt(2.0) - 1.0), rel=1e-14)
    # Everything past 2^4 is 2^-5/2 / (1 - 2^-1/2).
    expected = 2.0**-2.5 / (1.0 - 2.0**-0.5)
    assert holder.tail_sum(16) == pytest.approx(expected, rel=1e-14)

    inverse_square = CoefficientSchedule(ScheduleVariant.DYADIC_INVERSE_SQUARE)
    assert inverse_square.total() == pytest.approx(math.pi**2 / 6, rel=1e-14)
    assert inverse_square.tail_sum(2**10) == pytest.approx(
        math.pi**2 / 6 - sum(1.0 / j**2 for j in range(1, 11)), rel=1e-12
    )
    with pytest.raises(DomainError):
        inverse_square.tail_sum(4, power=0.5)

    assert CoefficientSchedule(ScheduleVariant.HADAMARD).total() == pytest.approx(2.0)


def test_schedule_validation():
    with pytest.raises(DomainError):
        CoefficientSchedule(ScheduleVariant.HADAMARD, scale=0.0)
    with pytest.raises(DomainError):
        CoefficientSchedule(ScheduleVariant.DYADIC_HOLDER)
    with pytest.raises(DomainError):
        CoefficientSchedule(ScheduleVariant.CUSTOM, entries=((3, 1.0), (3, 2.0)))

    custom = CoefficientSchedule(ScheduleVariant.CUSTOM, entries=((5, 0.5), (2, 1.0)))
    assert custom.entries == ((2, 1.0), (5, 0.5))
    assert custom.tail_sum(2) == 0.5


def test_build_series_rejects_mismatched_variants():
    with pytest.raises(IncompatibleVariantError):
        build_series("hadamard_2d", 3, 16)
    with pytest.raises(IncompatibleVariantError):
        build_series("notHs", 4, 16, seed=0)
    with pytest.raises(DomainError):
        build_series("anyn_holder", 3, 16)
    with pytest.raises(DomainError):
        build_series("notCbeta", 1, 16)


def test_certificates():
    holder = build_series("anyn_holder", 5, 2**10, alpha=0.5)
    assert holder.certificate == pytest.approx(1.0 / (2**0.5 - 1.0), rel=1e-12)

    not_c_beta = build_series(SeriesVariant.NOT_C_BETA, 3, 2**10)
    assert not_c_beta.certificate == pytest.approx(math.pi**2 / 6, rel=1e-12)
    assert not_c_beta.scaled(0.5).certificate == pytest.approx(math.pi**2 / 12, rel=1e-12)

    assert build_series("hadamard_2d", 2, 2**10).certificate == pytest.approx(2.0)


def test_unbounded_certificate_is_logged(caplog):
    with caplog.at_level(logging.WARNING):
        series = build_series("notHs", 3, 64, seed=1)
    assert math.isinf(series.certificate)
    assert "no finite normal-convergence certificate" in caplog.text
    assert math.isfinite(series.tail_bound(0.5))


def test_evaluation_along_the_first_axis():
    series = build_series("notCbeta", 3, 2**10)
    expected = sum(0.5 ** (2**j) / j**2 for j in range(1, 11))
    assert series([0.5, 0.0, 0.0]) == pytest.approx(expected, rel=1e-13)
    assert series([0.0, 0.0, 0.0]) == 0.0
    with pytest.raises(DomainError):
        series([1.5, 0.0, 0.0])


def test_trace_matches_evaluation_on_the_sphere():
    series = build_series("notHs", 3, 32, seed=7)
    points = build_sphere_quadrature(3, 8).nodes
    assert series.trace(points) == pytest.approx(series(points), rel=1e-12, abs=1e-14)


def test_eval_ball_series_tail():
    series = build_series("notCbeta", 3, 2**10)
    near_boundary = eval_ball_series(series, [1.0, 0.0, 0.0], tol=1e-6)
    assert not near_boundary.within_tolerance
    assert near_boundary.tail_bound == pytest.approx(
        math.pi**2 / 6 - sum(1.0 / j**2 for j in range(1, 11)), rel=1e-12
    )

    inside = eval_ball_series(series, [0.5, 0.0, 0.0], tol=1e-6)
    assert inside.within_tolerance
    assert inside.tail_bound < 1e-100

    with pytest.raises(DomainError):
        eval_ball_series(series, [0.5, 0.0, 0.0], tol=0.0)


def test_kelvin_transform():
    series = build_series("notCbeta", 3, 2**6)
    outer = kelvin_transform(series)
    expected = sum(2.0 ** (-1 - 2**j) / j**2 for j in range(1, 7))
    assert outer([2.0, 0.0, 0.0]) == pytest.approx(expected, rel=1e-13)
    # Both profiles agree on the unit sphere.
    assert outer([0.0, 0.6, 0.8]) == pytest.approx(series([0.0, 0.6, 0.8]), rel=1e-13)

    with pytest.raises(KelvinTransformError):
        outer.kelvin_transform()
    with pytest.raises(DomainError):
        outer([0.5, 0.0, 0.0])


def test_gradient_matches_finite_differences():
    series = build_series("anyn_holder", 3, 16, alpha=0.5).kelvin_transform()
    x = np.array([1.2, -0.4, 0.7])
    h = 1e-6
    numeric = [
        (series(x + h * e) - series(x - h * e)) / (2 * h) for e in np.eye(3)
    ]
    assert series.gradient(x) == pytest.approx(numeric, rel=1e-6, abs=1e-9)


def test_radial_derivative():
    series = build_series("hadamard_2d", 2, 16)
    # u(r, 0) = r + r^4 / 2 + r^16 / 4.
    r = 0.8
    assert series.radial_derivative([r, 0.0]) == pytest.approx(1 + 2 * r**3 + 4 * r**15)
    with pytest.raises(DomainError):
        series.radial_derivative([0.0, 0.0])


def test_truncated_and_negated():
    series = build_series("notCbeta", 3, 2**8)
    assert series.truncated(2**4).degrees == [2, 4, 8, 16]
    with pytest.raises(DomainError):
        series.truncated(2**9)
    assert series.negated()([0.3, 0.1, 0.2]) == pytest.approx(-series([0.3, 0.1, 0.2]))


def test_dict_round_trip():
    series = build_series("notHs", 2, 64, scale=0.25, seed=3).kelvin_transform().negated()
    rebuilt = BallSeries.from_dict(series.to_dict())
    x = np.array([[1.3, 0.2], [-0.5, 1.5]])
    assert rebuilt(x) == pytest.approx(series(x), rel=1e-14)
    assert rebuilt.to_dict() == series.to_dict()


def test_finite_difference_harmonicity():
    series = build_series("notHs", 3, 16, seed=2)
    points = np.array([[0.2, 0.1, -0.3], [0.0, 0.5, 0.4], [-0.6, 0.0, 0.1]])
    report = check_harmonic_fd(series, points)
    assert not report.flagged

    not_harmonic = check_harmonic_fd(lambda x: np.sum(x**2, axis=1), points)
    assert not_harmonic.max_residual == pytest.approx(6.0, rel=1e-6)
    assert not_harmonic.flagged

    with pytest.raises(DomainError):
        check_harmonic_fd(series, [[0.0, 0.0, 0.9995]])


def test_mean_value_property():
    series = build_series("notCbeta", 3, 16)
    rule = build_sphere_quadrature(3, 40)
    assert mean_value_check(series, [0.2, 0.1, 0.0], 0.5, rule) < 1e-12
    with pytest.raises(SupportError):
        mean_value_check(series, [0.6, 0.0, 0.0], 0.5, rule)


SERIES_CASES = [
    pytest.param("notCbeta", 3, {}, id="notCbeta-n3"),
    pytest.param("anyn_holder", 4, {"alpha": 0.5}, id="anyn_holder-n4"),
    pytest.param("hadamard_2d", 2, {}, id="hadamard_2d"),
    pytest.param("zonal", 3, {}, id="zonal-n3"),
    pytest.param("notHs", 2, {"seed": 1}, id="notHs-n2"),
    pytest.param("notHs", 3, {"seed": 1}, id="notHs-n3", marks=pytest.mark.slow),
]


@pytest.mark.parametrize("variant,n,options", SERIES_CASES)
def test_tail_bound_covers_the_omitted_terms(variant, n, options):
    # 4^3 and 4^6 are also powers of two, so one pair serves every support.
    full = build_series(variant, n, 2**12, **options)
    short = full.truncated(2**6)
    points = random_ball_points(n, 100, 0.0, 0.95, seed=5)
    gap = np.abs(full(points) - short(points))
    bounds = np.array([short.tail_bound(float(r)) for r in np.linalg.norm(points, axis=1)])
    assert np.all(np.isfinite(bounds))
    assert np.all(gap <= bounds * (1 + 1e-9) + 1e-13)


@pytest.mark.parametrize("variant,n,options", SERIES_CASES[:5])
def test_kelvin_transform_agrees_on_the_sphere(variant, n, options):
    u = build_series(variant, n, 2**6, **options)
    theta = random_sphere_points(n, 100, seed=9)
    assert kelvin_transform(u)(theta) == pytest.approx(u(theta), rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("scale", [0.5, 3.0])
@pytest.mark.parametrize("variant,n,options", SERIES_CASES[:5])
def test_scaling_multiplies_the_values(variant, n, options, scale):
    u = build_series(variant, n, 2**6, **options)
    points = random_ball_points(n, 20, 0.0, 1.0, seed=2)
    expected = scale * u(points)
    assert u.scaled(scale)(points) == pytest.approx(expected, rel=1e-14, abs=1e-300)
    rebuilt = build_series(variant, n, 2**6, scale=scale, **options)
    assert rebuilt(points) == pytest.approx(expected, rel=1e-14, abs=1e-300)
