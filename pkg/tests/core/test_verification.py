"""End-to-end verification reports of the transmission examples."""

import logging

import pytest

from rough_harmonics.transmission import (
    build_instance,
    default_bumps,
    default_theta_grid,
    first_axis_diagnostic,
    inversion_diagnostic,
    verify_instance,
)

CONDITIONS = [
    "harmonic_inner",
    "harmonic_outer",
    "interface_trace",
    "normal_jump",
    "outer_dirichlet",
    "growth",
]


def test_tilde_example_passes():
    instance = build_instance("tilde", 3, 2**6)
    report = verify_instance(instance, seed=1)
    assert [check.name for check in report.conditions] == CONDITIONS
    assert report.passed, report.failures

    document = report.to_dict()
    assert document["pass"] is True
    assert document["instance"]["transmission_variant"] == "tilde"
    assert len(document["diagnostics"]["bumps"]) == 5
    assert document["diagnostics"]["inversion"]["monotone"] is True
    assert document["diagnostics"]["first_axis"]["residual"] == 0.0


def test_unit_scale_breaks_the_interface(caplog):
    instance = build_instance("tilde", 3, 2**6, rho=1.0)
    with caplog.at_level(logging.WARNING):
        report = verify_instance(instance, bumps=[])
    assert not report.passed
    assert "interface_trace" in report.failures
    interface = report.conditions[2]
    assert interface.witnesses
    assert "FAIL" in caplog.text

    diagnostic = report.diagnostics["first_axis"]
    assert diagnostic["phi_e1"] == pytest.approx(1.644934, abs=1e-6)
    assert diagnostic["residual"] == pytest.approx(2.806, abs=1e-3)


def test_higher_dimensions_use_the_pointwise_jump():
    instance = build_instance("tilde", 5, 2**5)
    report = verify_instance(instance)
    jump = report.conditions[3]
    assert jump.name == "normal_jump"
    assert jump.details == {"method": "classical"}
    assert report.passed, report.failures
    assert report.diagnostics["bumps"] == []


@pytest.mark.parametrize(
    "variant,seed,finite_tail",
    [("tilde", None, True), ("example", 3, False)],
)
def test_weak_jump_tolerance_carries_the_tail_budget(variant, seed, finite_tail):
    instance = build_instance(variant, 3, 2**5, seed=seed)
    report = verify_instance(instance, bumps=default_bumps(3, 2))
    rows = report.conditions[3].details["bumps"]
    assert len(rows) == 2
    for row in rows:
        assert row["tail_included"] is finite_tail
        if finite_tail:
            assert 0.0 < row["tail_budget"] <= row["tolerance"]
        else:
            assert row["tail_budget"] == float("inf")
            assert row["tolerance"] < row["tail_budget"]


def test_random_example_skips_the_first_axis_diagnostic():
    instance = build_instance("example", 3, 2**5, seed=3)
    assert "skipped" in first_axis_diagnostic(instance)


def test_inversion_diagnostic():
    instance = build_instance("holder", 3, 2**6, alpha=0.5)
    diagnostic = inversion_diagnostic(instance, default_theta_grid(3, 10))
    assert diagnostic["monotone"]
    assert diagnostic["min_increment"] > 0.0
    assert diagnostic["max_round_trip_error"] < 1e-9


@pytest.mark.slow
def test_holder_example_carries_the_preservation_diagnostic():
    instance = build_instance("holder", 4, 2**8, alpha=0.5)
    report = verify_instance(instance)
    assert report.passed, report.failures
    assert report.diagnostics["holder_preservation"]["pass"] is True
