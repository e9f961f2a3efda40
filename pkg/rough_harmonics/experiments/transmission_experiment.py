"""Verification of the explicit transmission examples."""

from __future__ import annotations

import click

from rough_harmonics.cli import common_options as opts
from rough_harmonics.experiment_base import ExperimentBase, ExperimentResult
from rough_harmonics.experiments._properties import dimension_property, truncation_property
from rough_harmonics.transmission import (
    DEFAULT_TRUNCATION,
    TransmissionVariant,
    build_instance,
    default_bumps,
    verify_instance,
)
from rough_harmonics.typing import (
    BooleanType,
    IntegerType,
    NumberType,
    Property,
    PropertiesList,
    StringType,
)


class TransmissionVerifyExperiment(ExperimentBase):
    """Check harmonicity, interface trace, normal jump, outer data and growth."""

    name = "transmission-verify"
    cli_options = (
        opts.VARIANT,
        opts.DIMENSION,
        opts.TRUNCATION,
        click.option("--bumps", help="Number of test bumps.", type=click.STRING),
        opts.RHO,
        opts.ALPHA,
        opts.SEED,
    )
    config_jsonschema = PropertiesList(
        Property(
            "variant",
            StringType,
            required=True,
            allowed_values=[v.value for v in TransmissionVariant],
            description="Transmission example.",
        ),
        dimension_property(),
        truncation_property(DEFAULT_TRUNCATION),
        Property("bumps", IntegerType, default=5, description="Number of test bumps."),
        Property(
            "rho",
            NumberType,
            description="Coefficient scale (default (1 - 1e-3) / M_cert).",
        ),
        Property("alpha", NumberType, description="Exponent of the holder example."),
        Property("seed", IntegerType, default=0, description="Seed of harmonics and grids."),
    ).to_dict()
    output_schema = PropertiesList(
        Property("condition", StringType),
        Property("residual", NumberType),
        Property("tolerance", NumberType),
        Property("pass", BooleanType),
    ).to_dict()

    def run(self) -> ExperimentResult:
        """One row per condition; failing conditions contribute witnesses."""
        n = int(self.config["n"])
        seed = int(self.config["seed"])
        instance = build_instance(
            self.config["variant"],
            n,
            int(self.config["k"]),
            rho=self.config.get("rho"),
            seed=seed,
            alpha=self.config.get("alpha"),
        )
        self.logger.info(
            "Verifying %s example, n=%d, K=%d, rho=%.6g.",
            instance.variant,
            n,
            instance.truncation,
            instance.rho,
        )
        bumps = default_bumps(n, int(self.config["bumps"])) if n in (2, 3) else None
        report = verify_instance(instance, bumps, seed=seed, n_jobs=int(self.config["n_jobs"]))
        rows = [
            {
                "condition": check.name,
                "residual": check.residual,
                "tolerance": check.tolerance,
                "pass": check.passed,
            }
            for check in report.conditions
        ]
        witnesses = [
            {"condition": check.name, "witnesses": check.witnesses}
            for check in report.conditions
            if not check.passed
        ]
        return ExperimentResult(
            rows=rows, document=report.to_dict(), passed=report.passed, witnesses=witnesses
        )
