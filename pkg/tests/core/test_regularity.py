"""Spectral Sobolev scans, Dirichlet energies, moduli of continuity and Fourier decay."""

import math

import numpy as np
import pytest

from rough_harmonics.exceptions import (
    DomainError,
    InsufficientQuadratureError,
    UnsupportedDimensionError,
)
from rough_harmonics.harmonics import highest_weight_l2_norm
from rough_harmonics.regularity import (
    FourierVerdict,
    SobolevVerdict,
    classify_sobolev,
    cosine_coefficients,
    dirichlet_energy_2d,
    energy_partial_sums,
    expected_sobolev_threshold,
    fourier_decay_certificate,
    holder_modulus,
    sobolev_block_increments,
    sobolev_partial_sum,
    spectral_coefficients,
)
from rough_harmonics.series import build_series
from rough_harmonics.sphere import build_sphere_quadrature


def test_spectrum_of_a_disk_series():
    series = build_series("hadamard_2d", 2, 64)
    spectrum = spectral_coefficients(series, 2, 64)
    energies = {row["k"]: row["sum_sq"] for row in spectrum.to_rows()}
    assert energies[1] == pytest.approx(math.pi, rel=1e-12)
    assert energies[16] == pytest.approx(math.pi / 16, rel=1e-12)
    assert energies[5] == pytest.approx(0.0, abs=1e-20)


def test_spectrum_of_random_harmonics_on_s2():
    series = build_series("notHs", 3, 16, seed=5)
    spectrum = spectral_coefficients(series, 3, 16, build_sphere_quadrature(3, 32))
    for k, a in [(2, 1.0), (4, 1 / 4), (8, 1 / 9), (16, 1 / 16)]:
        assert spectrum.degree_energy(k) == pytest.approx(a * a, rel=1e-10)
    assert spectrum.degree_energy(3) == pytest.approx(0.0, abs=1e-20)


def test_spectrum_needs_an_exact_rule():
    series = build_series("notCbeta", 3, 16)
    with pytest.raises(InsufficientQuadratureError):
        spectral_coefficients(series, 3, 16, build_sphere_quadrature(3, 20))
    with pytest.raises(UnsupportedDimensionError):
        spectral_coefficients(series, 4, 16)


def test_sobolev_partial_sum():
    series = build_series("notCbeta", 3, 2**4)
    expected = sum(highest_weight_l2_norm(3, 2**j) ** 2 / j**4 for j in range(1, 5))
    assert sobolev_partial_sum(series, 0.0, 2**4) == pytest.approx(expected, rel=1e-13)
    # Schedule-backed sums ignore the truncation.
    assert sobolev_partial_sum(series, 0.0, 2**6) > expected
    with pytest.raises(DomainError):
        sobolev_partial_sum(series, -0.5, 16)


def test_sobolev_block_increments_normalize_out_the_weight():
    series = build_series("notCbeta", 2, 2**6)
    blocks = sobolev_block_increments(series, 0.5, 2**6)

    assert [b.degree for b in blocks] == [2**j for j in range(1, 7)]
    assert [b.block for b in blocks] == list(range(1, 7))
    # On the circle mu_k^(1/2) = k and ||Q_k||^2 = pi, so block j adds pi 2^j / j^4.
    for j, block in enumerate(blocks, start=1):
        assert block.increment == pytest.approx(math.pi * 2**j / j**4, rel=1e-12)
        assert block.normalized == pytest.approx(math.pi * 2**j, rel=1e-12)
    assert blocks[-1].partial_sum == pytest.approx(
        sum(math.pi * 2**j / j**4 for j in range(1, 7)), rel=1e-12
    )

    with pytest.raises(DomainError):
        sobolev_block_increments(series, -0.1, 2**6)


def test_expected_thresholds():
    assert expected_sobolev_threshold("notHs", 3) == 0.0
    assert expected_sobolev_threshold("notCbeta", 6) == 1.0
    assert expected_sobolev_threshold("anyn_holder", 4, alpha=0.25) == 0.75
    assert expected_sobolev_threshold("hadamard_2d", 2) == 0.5
    assert expected_sobolev_threshold("custom", 2) is None


def test_sobolev_scan_on_the_disk():
    series = build_series("notCbeta", 2, 2**20)
    flat, growing = classify_sobolev(series, [0.0, 0.5])

    assert flat.verdict is SobolevVerdict.CONVERGENT
    assert flat.limit_estimate == pytest.approx(math.pi**5 / 90, rel=1e-12)
    assert flat.s == 0.5
    assert len(flat.blocks) == 20

    assert growing.verdict is SobolevVerdict.DIVERGENT
    assert growing.fitted_exponent == pytest.approx(1.0, rel=1e-9)
    assert growing.expected_threshold == 0.0


def test_sobolev_scan_of_the_hadamard_series():
    series = build_series("hadamard_2d", 2, 4**8)
    below, threshold, above = classify_sobolev(series, [0.25, 0.5, 1.0])
    assert below.verdict is SobolevVerdict.CONVERGENT
    assert threshold.verdict is SobolevVerdict.DIVERGENT_MARGINAL
    assert above.verdict is SobolevVerdict.DIVERGENT
    assert above.fitted_exponent == pytest.approx(2.0, rel=1e-9)

    document = threshold.to_dict()
    assert document["verdict"] == "divergent-marginal"
    assert document["blocks"][0] == {"K": 1, "S_K": pytest.approx(math.pi)}


def test_sobolev_scan_rejects_large_sigma():
    with pytest.raises(DomainError):
        classify_sobolev(build_series("hadamard_2d", 2, 64), [2.5])


def test_dirichlet_energy_formula():
    series = build_series("hadamard_2d", 2, 4**5)
    assert dirichlet_energy_2d(series) == pytest.approx(6 * math.pi, rel=1e-14)
    assert energy_partial_sums(series, 3) == [
        (1, pytest.approx(math.pi)),
        (4, pytest.approx(2 * math.pi)),
        (16, pytest.approx(3 * math.pi)),
    ]


def test_dirichlet_energy_quadrature_matches_formula():
    series = build_series("hadamard_2d", 2, 4**3)
    quadrature = dirichlet_energy_2d(series, mode="quadrature")
    assert quadrature == pytest.approx(4 * math.pi, rel=1e-10)

    with pytest.raises(DomainError):
        dirichlet_energy_2d(series, mode="trapezoid")
    with pytest.raises(UnsupportedDimensionError):
        dirichlet_energy_2d(build_series("notCbeta", 3, 16))


def test_holder_modulus_of_a_smooth_function():
    table = holder_modulus(np.sin, sample_count=10_000, seed=1)
    assert table.slope == pytest.approx(1.0, abs=0.01)
    assert table.moduli[0] == pytest.approx(2.0**-20, rel=1e-3)
    assert len(table.to_rows()) == 19
    assert table.fitted_range == (2.0**-18, 2.0**-4)


def test_holder_modulus_is_independent_of_workers():
    scales = [2.0**-i for i in range(12, 2, -1)]
    serial = holder_modulus(np.cos, scales, seed=4, n_jobs=1)
    parallel = holder_modulus(np.cos, scales, seed=4, n_jobs=2)
    assert np.array_equal(serial.moduli, parallel.moduli)


def test_holder_modulus_validation():
    with pytest.raises(DomainError):
        holder_modulus(np.sin, [0.5])
    with pytest.raises(DomainError):
        holder_modulus(np.sin, sample_count=100)


def _lacunary_samples(size, terms):
    t = 2 * np.pi * np.arange(size) / size
    return sum(2.0 ** (-j / 2) * np.cos(2**j * t) for j in range(1, terms + 1))


def test_cosine_coefficients():
    t = 2 * np.pi * np.arange(64) / 64
    coefficients = cosine_coefficients(np.cos(3 * t) + 0.5 * np.cos(8 * t))
    assert coefficients[3] == pytest.approx(1.0)
    assert coefficients[8] == pytest.approx(0.5)
    assert coefficients[4] == pytest.approx(0.0, abs=1e-14)


def test_fourier_certificate_verdicts():
    samples = _lacunary_samples(2**14, 12)
    bounded = fourier_decay_certificate(samples, 0.5)
    assert bounded.verdict is FourierVerdict.BOUNDED
    assert bounded.growth_exponent == pytest.approx(0.0, abs=1e-9)
    assert bounded.running_sup[-1] == pytest.approx(1.0, rel=1e-9)
    assert bounded.to_rows()[3] == {
        "window": 3,
        "k_lo": 8,
        "k_hi": 15,
        "C": pytest.approx(1.0, rel=1e-9),
        "sup_C": pytest.approx(1.0, rel=1e-9),
    }

    growing = fourier_decay_certificate(samples, 0.75)
    assert growing.verdict is FourierVerdict.GROWING
    assert growing.growth_exponent == pytest.approx(0.25, rel=1e-6)


def test_fourier_certificate_validation():
    with pytest.raises(DomainError):
        fourier_decay_certificate(np.zeros(100), 0.5)
    with pytest.raises(InsufficientQuadratureError):
        fourier_decay_certificate(np.zeros(64), 0.5, max_frequency=32)
