"""Run the experiments behind the subcommands on small configurations."""

import math

import pytest

from rough_harmonics.exceptions import ConfigValidationError, DomainError
from rough_harmonics.experiments import (
    EXPERIMENTS,
    DimsExperiment,
    EnergyExperiment,
    EvalExperiment,
    FourierExperiment,
    HolderExperiment,
    NeuheiselSampleExperiment,
    SobolevExperiment,
    SpectrumExperiment,
    TransmissionVerifyExperiment,
    WeierstrassExperiment,
)


def test_every_subcommand_is_registered():
    assert list(EXPERIMENTS) == [
        "dims",
        "eval",
        "spectrum",
        "sobolev",
        "energy",
        "holder",
        "fourier",
        "weierstrass",
        "neuheisel-sample",
        "transmission-verify",
    ]


def test_dims():
    result = DimsExperiment(config={"n": "3", "k": "0..8"}).run()
    assert len(result.rows) == 9
    assert result.rows[2] == {"k": 2, "d_k": 5, "mu_k": 6.0}
    assert result.rows[8] == {"k": 8, "d_k": 17, "mu_k": 72.0}

    four = DimsExperiment(config={"n": 4, "k": [2]}).run()
    assert four.rows == [{"k": 2, "d_k": 9, "mu_k": 8.0}]


def test_dims_requires_a_dimension():
    with pytest.raises(ConfigValidationError):
        DimsExperiment(config={"k": "0..3"})


def test_eval_hadamard_inside_the_disk():
    result = EvalExperiment(
        config={"variant": "hadamard", "n": 2, "point": "0.5,0", "tol": 1e-12}
    ).run()
    row = result.rows[0]
    expected = sum(2.0**-j * 0.5 ** (4**j) for j in range(4))
    assert row["value"] == pytest.approx(expected, rel=1e-14)
    assert row["within_tolerance"] is True
    assert row["warning"] == ""
    assert result.document["point"] == [0.5, 0.0]


def test_eval_kelvin_transform_outside_the_ball():
    direct = EvalExperiment(config={"variant": "notCbeta", "n": 3, "point": "0.5,0,0"}).run()
    kelvin = EvalExperiment(
        config={"variant": "notCbeta", "n": 3, "point": "2,0,0", "kelvin": "true"}
    ).run()
    # u*(x) = |x|^{2-n} u(x/|x|^2) in R^3.
    assert kelvin.rows[0]["value"] == pytest.approx(direct.rows[0]["value"] / 2, rel=1e-12)


def test_eval_point_dimension_mismatch():
    experiment = EvalExperiment(config={"variant": "notCbeta", "n": 3, "point": "0.1,0.2"})
    with pytest.raises(DomainError):
        experiment.run()


def test_spectrum_of_the_hadamard_series():
    result = SpectrumExperiment(config={"variant": "hadamard", "n": 2, "k": 16}).run()
    by_degree = {row["k"]: row for row in result.rows}
    assert by_degree[1]["sum_sq"] == pytest.approx(math.pi, rel=1e-10)
    assert by_degree[4]["expected"] == pytest.approx(math.pi / 4, rel=1e-12)
    assert by_degree[4]["sum_sq"] == pytest.approx(math.pi / 4, rel=1e-10)
    assert by_degree[2]["sum_sq"] == pytest.approx(0.0, abs=1e-12)


def test_sobolev_limit_of_the_random_series():
    result = SobolevExperiment(
        config={"variant": "notHs", "n": 2, "seed": 7, "sigma": "0", "k": "2^20"}
    ).run()
    row = result.rows[0]
    assert row["verdict"] == "convergent"
    assert row["limit_estimate"] == pytest.approx(math.pi**4 / 90, abs=1e-6)
    assert row["K_last"] == 2**20
    assert result.document["scans"][0]["sigma"] == 0.0


def test_sobolev_thresholds_in_three_dimensions():
    result = SobolevExperiment(
        config={"variant": "notCbeta", "n": 3, "sigma": "0.15,0.35", "k": "2^20"}
    ).run()
    convergent, divergent = result.rows
    assert convergent["verdict"] == "convergent"
    assert divergent["verdict"] == "divergent"
    assert divergent["fitted_exponent"] == pytest.approx(2 * (0.35 - 0.25), abs=0.02)
    assert divergent["r_squared"] >= 0.99
    assert divergent["expected_threshold"] == 0.25


def test_energy_of_the_hadamard_truncations():
    result = EnergyExperiment(
        config={"variant": "hadamard", "terms": 6, "quadrature": False}
    ).run()
    assert result.document["formula"] == pytest.approx(6 * math.pi, rel=1e-12)
    assert result.document["K"] == 4**5
    assert [row["formula"] for row in result.rows] == pytest.approx(
        [j * math.pi for j in range(1, 7)], rel=1e-12
    )
    assert result.document["quadrature"] is None


def test_energy_quadrature_matches_the_formula():
    result = EnergyExperiment(config={"variant": "hadamard", "terms": "4"}).run()
    assert result.document["formula"] == pytest.approx(4 * math.pi, rel=1e-12)
    assert result.document["relative_difference"] <= 1e-6
    assert result.rows[-1]["quadrature"] == pytest.approx(4 * math.pi, rel=1e-6)
    assert result.rows[0]["quadrature"] is None


def test_energy_needs_terms_or_truncation():
    with pytest.raises(DomainError):
        EnergyExperiment(config={"variant": "hadamard"}).run()


def test_holder_exponent_of_the_weierstrass_function():
    result = HolderExperiment(
        config={"function": "weierstrass", "alpha": 0.5, "scale_min": 2.0**-12, "seed": 5}
    ).run()
    assert result.document["slope"] == pytest.approx(0.5, abs=0.05)
    assert len(result.rows) == 11
    assert result.rows[0]["delta"] == 2.0**-12


def test_holder_scale_range_validation():
    with pytest.raises(DomainError):
        HolderExperiment(config={"scale_min": 0.25, "scale_max": 0.125}).run()
    with pytest.raises(DomainError):
        HolderExperiment(config={"scale_min": 0.1, "scale_max": 0.25}).run()


def test_fourier_recovers_the_lacunary_coefficients():
    result = FourierExperiment(
        config={"function": "weierstrass", "function_alpha": 0.5, "n": "2^18", "alpha": 0.5}
    ).run()
    document = result.document
    assert document["verdict"] == "bounded"
    assert document["sampling_tail_bound"] == 0.0
    recovered = {item["j"]: item for item in document["recovered"]}
    for j in range(13):
        assert recovered[j]["c_k"] == pytest.approx(2.0 ** (-j / 2), abs=1e-6)


@pytest.mark.parametrize("alpha", [0.05, 0.1, 0.2])
def test_fourier_certificate_of_the_hardy_function_grows(alpha):
    result = FourierExperiment(config={"function": "hardy", "n": "2^14", "alpha": alpha}).run()
    assert result.document["verdict"] == "growing"
    assert result.document["growth_exponent"] > 0.02


def test_weierstrass_evaluation_and_ratio_check():
    result = WeierstrassExperiment(
        config={"t": "0,1", "tol": 1e-6, "samples": 20_000, "seed": 3}
    ).run()
    assert result.passed
    assert result.rows[0]["value"] == pytest.approx(1 / (1 - 2**-0.5), abs=1e-6)
    check = result.document["holder_check"]
    assert check["pass"] is True
    assert check["max_ratio"] <= check["constant"]
    assert result.witnesses == []


def test_weierstrass_hardy_law_skips_the_ratio_check():
    result = WeierstrassExperiment(config={"law": "hardy", "t": "0", "tol": 1e-3}).run()
    assert "holder_check" not in result.document
    row = result.rows[0]
    # The frequency cap stops the sum early; the remainder is the exact zeta tail.
    assert row["tail_bound"] > 1e-3
    assert row["value"] + row["tail_bound"] == pytest.approx(math.pi**2 / 6, rel=1e-12)


def test_neuheisel_sample_reports_ratios():
    result = NeuheiselSampleExperiment(config={"n": 3, "k": "16,32", "seeds": 3}).run()
    assert [row["k"] for row in result.rows] == [16, 32]
    for row in result.rows:
        assert 0.0 < row["min_ratio"] <= row["median_ratio"] <= row["max_ratio"]
        assert row["median_sup"] <= row["bound"]


def test_neuheisel_sample_validation():
    with pytest.raises(DomainError):
        NeuheiselSampleExperiment(config={"k": [1]}).run()
    with pytest.raises(DomainError):
        NeuheiselSampleExperiment(config={"k": [16], "seeds": 0}).run()


def test_transmission_verify():
    result = TransmissionVerifyExperiment(
        config={"variant": "tilde", "n": 3, "k": "2^6", "bumps": 3}
    ).run()
    assert result.passed
    assert [row["condition"] for row in result.rows] == [
        "harmonic_inner",
        "harmonic_outer",
        "interface_trace",
        "normal_jump",
        "outer_dirichlet",
        "growth",
    ]
    assert all(row["pass"] for row in result.rows)
    assert result.witnesses == []


def test_transmission_verify_failure_carries_witnesses():
    result = TransmissionVerifyExperiment(
        config={"variant": "tilde", "n": 3, "k": "2^6", "bumps": 1, "rho": 1.0}
    ).run()
    assert not result.passed
    assert result.witnesses
    assert result.witnesses[0]["condition"] == "interface_trace"
    assert result.witnesses[0]["witnesses"]
