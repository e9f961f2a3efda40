"""Experiments on ball series: dimensions, evaluation, spectra, Sobolev scans, energies."""

from __future__ import annotations

import math
from typing import Any, Dict, List

import click

from rough_harmonics.cli import common_options as opts
from rough_harmonics.exceptions import DomainError
from rough_harmonics.experiment_base import ExperimentBase, ExperimentResult
from rough_harmonics.experiments._properties import (
    SERIES_CONFIG,
    build_configured_series,
    dimension_property,
    series_variant,
    truncation_property,
)
from rough_harmonics.harmonics import harmonic_dimension, laplace_beltrami_eigenvalue
from rough_harmonics.regularity import (
    classify_sobolev,
    dirichlet_energy_2d,
    energy_partial_sums,
    harmonic_norm_squared,
    spectral_coefficients,
)
from rough_harmonics.series import SeriesVariant, eval_ball_series
from rough_harmonics.sphere import build_sphere_quadrature
from rough_harmonics.typing import (
    ArrayType,
    BooleanType,
    DyadicIntegerType,
    IntegerType,
    NumberType,
    Property,
    PropertiesList,
    StringType,
)

# Largest truncation for which quadrature energies are computed.
MAX_QUADRATURE_DEGREE = 2**12


class DimsExperiment(ExperimentBase):
    """Dimensions d_k and Laplace-Beltrami eigenvalues mu_k of the harmonic spaces."""

    name = "dims"
    cli_options = (
        opts.DIMENSION,
        click.option("--k", help="Degrees, e.g. 0..8.", type=click.STRING),
    )
    config_jsonschema = PropertiesList(
        dimension_property(),
        Property(
            "k",
            ArrayType(IntegerType),
            default=list(range(9)),
            description="Degrees, as a list or an 'a..b' range.",
        ),
    ).to_dict()
    output_schema = PropertiesList(
        Property("k", IntegerType),
        Property("d_k", IntegerType),
        Property("mu_k", NumberType),
    ).to_dict()

    def run(self) -> ExperimentResult:
        """One row per degree."""
        n = int(self.config["n"])
        rows = [
            {
                "k": k,
                "d_k": harmonic_dimension(n, k),
                "mu_k": laplace_beltrami_eigenvalue(n, k),
            }
            for k in self.config["k"]
        ]
        return ExperimentResult(rows=rows, document={"n": n, "rows": rows})


class EvalExperiment(ExperimentBase):
    """Evaluate a truncated series, or its Kelvin transform, with a certified tail."""

    name = "eval"
    cli_options = (
        opts.VARIANT,
        opts.DIMENSION,
        opts.TRUNCATION,
        click.option("--point", help="Point x1,...,xn.", type=click.STRING),
        opts.RHO,
        opts.ALPHA,
        opts.SEED,
        opts.TOLERANCE,
        click.option("--kelvin", is_flag=True, help="Evaluate the Kelvin transform."),
    )
    config_jsonschema = SERIES_CONFIG.extend(
        PropertiesList(
            truncation_property(2**10),
            Property(
                "point",
                ArrayType(NumberType),
                required=True,
                description="Point x1,...,xn.",
            ),
            Property("tol", NumberType, default=1e-6, description="Tail tolerance."),
            Property("kelvin", BooleanType, default=False, description="Use u*."),
        )
    ).to_dict()
    output_schema = PropertiesList(
        Property("value", NumberType),
        Property("tail_bound", NumberType),
        Property("within_tolerance", BooleanType),
        Property("warning", StringType),
    ).to_dict()

    def run(self) -> ExperimentResult:
        """A single row with the value and its tail bound."""
        series = build_configured_series(dict(self.config))
        if self.config["kelvin"]:
            series = series.kelvin_transform()
        point = list(self.config["point"])
        if len(point) != series.dim:
            raise DomainError(f"The point has {len(point)} coordinates, expected {series.dim}.")
        evaluation = eval_ball_series(series, point, float(self.config["tol"]))
        warning = (
            ""
            if evaluation.within_tolerance
            else f"tail bound {evaluation.tail_bound:.3g} exceeds tolerance {self.config['tol']}"
        )
        row = {
            "value": evaluation.value,
            "tail_bound": evaluation.tail_bound,
            "within_tolerance": evaluation.within_tolerance,
            "warning": warning,
        }
        return ExperimentResult(rows=[row], document={"point": point, **row})


class SpectrumExperiment(ExperimentBase):
    """Project the boundary trace onto spherical-harmonic bases by product quadrature."""

    name = "spectrum"
    cli_options = (
        opts.VARIANT,
        opts.DIMENSION,
        opts.TRUNCATION,
        click.option("--resolution", help="Product-rule degree.", type=click.STRING),
        opts.RHO,
        opts.ALPHA,
        opts.SEED,
    )
    config_jsonschema = SERIES_CONFIG.extend(
        PropertiesList(
            truncation_property(64),
            Property(
                "resolution",
                IntegerType,
                description="Product-rule degree; at least 2K (default 2K).",
            ),
        )
    ).to_dict()
    output_schema = PropertiesList(
        Property("k", IntegerType),
        Property("sum_sq", NumberType),
        Property("expected", NumberType),
    ).to_dict()

    def run(self) -> ExperimentResult:
        """Rows (k, sum_j |<u, Y_kj>|^2, a_k^2 ||Y_k||^2)."""
        series = build_configured_series(dict(self.config))
        k_max = int(self.config["k"])
        resolution = self.config.get("resolution") or max(2 * k_max, 1)
        rule = build_sphere_quadrature(series.dim, int(resolution))
        spectrum = spectral_coefficients(series, series.dim, k_max, rule)
        support = set(series.degrees)
        rows = []
        for row in spectrum.to_rows():
            k = row["k"]
            a = series.factor * series.schedule.base_coefficient(k) if k in support else 0.0
            row["expected"] = a * a * harmonic_norm_squared(series.kind, series.dim, k)
            rows.append(row)
        self.logger.info("Projected degrees 0..%d on a degree-%d rule.", k_max, rule.degree)
        return ExperimentResult(rows=rows, document={"series": series.to_dict(), "rows": rows})


class SobolevExperiment(ExperimentBase):
    """Scan spectral Sobolev partial sums S_K(sigma) and classify their growth."""

    name = "sobolev"
    cli_options = (
        opts.VARIANT,
        opts.DIMENSION,
        opts.TRUNCATION,
        click.option("--sigma", help="Comma list of sigma values.", type=click.STRING),
        opts.RHO,
        opts.ALPHA,
        opts.SEED,
    )
    config_jsonschema = SERIES_CONFIG.extend(
        PropertiesList(
            truncation_property(2**20),
            Property(
                "sigma",
                ArrayType(NumberType),
                required=True,
                description="Boundary exponents sigma in [0, 2].",
            ),
        )
    ).to_dict()
    output_schema = PropertiesList(
        Property("sigma", NumberType),
        Property("s", NumberType),
        Property("K_last", IntegerType),
        Property("S_K", NumberType),
        Property("verdict", StringType),
        Property("fitted_exponent", NumberType),
        Property("r_squared", NumberType),
        Property("limit_estimate", NumberType),
        Property("expected_threshold", NumberType),
    ).to_dict()

    def run(self) -> ExperimentResult:
        """One row per sigma; the JSON document carries the block tables."""
        series = build_configured_series(dict(self.config))
        scans = classify_sobolev(series, list(self.config["sigma"]))
        rows = []
        for scan in scans:
            if scan.verdict.value == "inconclusive":
                self.logger.warning("Sobolev scan at sigma=%s is inconclusive.", scan.sigma)
            rows.append(
                {
                    "sigma": scan.sigma,
                    "s": scan.s,
                    "K_last": scan.blocks[-1][0] if scan.blocks else 0,
                    "S_K": scan.last_partial_sum,
                    "verdict": str(scan.verdict),
                    "fitted_exponent": scan.fitted_exponent,
                    "r_squared": scan.r_squared,
                    "limit_estimate": scan.limit_estimate,
                    "expected_threshold": scan.expected_threshold,
                }
            )
        return ExperimentResult(
            rows=rows,
            document={"series": series.to_dict(), "scans": [s.to_dict() for s in scans]},
        )


class EnergyExperiment(ExperimentBase):
    """Dirichlet energies of disk truncations: closed form against quadrature."""

    name = "energy"
    cli_options = (
        opts.VARIANT,
        click.option("--terms", help="Number of retained terms J.", type=click.STRING),
        opts.TRUNCATION,
        opts.ALPHA,
        opts.SEED,
        click.option("--quadrature/--no-quadrature", default=True, help="Integrate |grad u|^2."),
    )
    config_jsonschema = PropertiesList(
        Property(
            "variant",
            StringType,
            default="hadamard",
            allowed_values=["hadamard", "hadamard_2d", "notCbeta", "anyn_holder", "notHs"],
            description="Disk series.",
        ),
        Property("terms", IntegerType, description="Number of retained terms J."),
        Property("k", DyadicIntegerType, description="Truncation K (instead of terms)."),
        Property("seed", IntegerType),
        Property("alpha", NumberType),
        Property("quadrature", BooleanType, default=True, description="Also integrate |grad u|^2."),
    ).to_dict()
    output_schema = PropertiesList(
        Property("terms", IntegerType),
        Property("K", IntegerType),
        Property("formula", NumberType),
        Property("quadrature", NumberType),
        Property("relative_difference", NumberType),
    ).to_dict()

    def _truncation(self, variant: SeriesVariant) -> int:
        if self.config.get("k") is not None:
            return int(self.config["k"])
        terms = self.config.get("terms")
        if not terms or terms < 1:
            raise DomainError("Give either a positive term count or a truncation K.")
        probe = build_configured_series(
            {"variant": variant.value, "n": 2, "seed": 0, "alpha": self.config.get("alpha")},
            k_max=0,
        )
        degrees = probe.schedule.iter_support()
        return [next(degrees) for _ in range(int(terms))][-1]

    def run(self) -> ExperimentResult:
        """Partial-sum rows; the last row carries the quadrature energy."""
        variant = series_variant(self.config["variant"])
        k_max = self._truncation(variant)
        series = build_configured_series(
            {
                "variant": variant.value,
                "n": 2,
                "seed": self.config.get("seed"),
                "alpha": self.config.get("alpha"),
            },
            k_max=k_max,
        )
        partial = energy_partial_sums(series, len(series.degrees))
        formula = dirichlet_energy_2d(series, mode="formula")
        quadrature = None
        if self.config["quadrature"]:
            if series.max_degree <= MAX_QUADRATURE_DEGREE:
                quadrature = dirichlet_energy_2d(series, mode="quadrature")
            else:
                self.logger.warning(
                    "Skipping quadrature energy above degree %d.", MAX_QUADRATURE_DEGREE
                )
        relative = (
            abs(quadrature - formula) / abs(formula)
            if quadrature is not None and formula
            else None
        )
        rows: List[Dict[str, Any]] = []
        for j, (k, energy) in enumerate(partial, start=1):
            last = j == len(partial)
            rows.append(
                {
                    "terms": j,
                    "K": k,
                    "formula": energy,
                    "quadrature": quadrature if last else None,
                    "relative_difference": relative if last else None,
                }
            )
        document = {
            "variant": str(variant),
            "terms": len(partial),
            "K": k_max,
            "formula": formula,
            "quadrature": quadrature,
            "relative_difference": relative,
            "formula_over_pi": formula / math.pi,
            "partial_sums": [{"K": k, "energy": e} for k, e in partial],
        }
        return ExperimentResult(rows=rows, document=document)
