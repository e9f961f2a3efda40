"""Experiments on one-variable regularity: moduli, Fourier decay, Weierstrass, Neuheisel."""

from __future__ import annotations

import math
from typing import Any, Dict, List, Optional

import click
import numpy as np
from joblib import Parallel, delayed
from memoization import cached

from rough_harmonics.cli import common_options as opts
from rough_harmonics.exceptions import DomainError
from rough_harmonics.experiment_base import ExperimentBase, ExperimentResult
from rough_harmonics.experiments._properties import dimension_property
from rough_harmonics.harmonics import (
    HarmonicKind,
    estimate_sup_norm,
    legendre_table,
    random_unit_harmonic,
    sup_norm_bound,
)
from rough_harmonics.regularity import DEFAULT_SCALES, fourier_decay_certificate, holder_modulus
from rough_harmonics.series import SeriesVariant, build_series
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
from rough_harmonics.weierstrass import (
    AmplitudeLaw,
    LacunaryCosineSeries,
    holder_bound_constant,
    holder_ratio_check,
    lacunary_eval,
    lift_as_lacunary,
)

FUNCTION_NAMES = ["weierstrass", "hardy", "lift-notCbeta", "lift-anyn_holder"]
_LIFT_VARIANTS = {
    "lift-notCbeta": SeriesVariant.NOT_C_BETA,
    "lift-anyn_holder": SeriesVariant.ANYN_HOLDER,
}

_FUNCTION_OPTION = click.option(
    "--function", help="One of: " + ", ".join(FUNCTION_NAMES) + ".", type=click.STRING
)
_SAMPLES_OPTION = click.option("--samples", help="Number of random samples.", type=click.STRING)


def _function_property(default: str = "weierstrass") -> Property:
    return Property(
        "function",
        StringType,
        default=default,
        allowed_values=FUNCTION_NAMES,
        description="Function to analyse; lifts restrict a ball trace to a great circle.",
    )


def build_lacunary(
    function: str, b: int, alpha: Optional[float], k_max: int = 2**40
) -> LacunaryCosineSeries:
    """The lacunary series behind a function name, at the frequency cap.

    Circle lifts are built from the ball series truncated at ``k_max``; on the circle the
    highest-weight harmonics reduce to cos(kt), so the disk is enough.
    """
    if function == "weierstrass":
        s = LacunaryCosineSeries(b, AmplitudeLaw.WEIERSTRASS, alpha=alpha)
    elif function == "hardy":
        s = LacunaryCosineSeries(b, AmplitudeLaw.HARDY)
    elif function in _LIFT_VARIANTS:
        s = lift_as_lacunary(build_series(_LIFT_VARIANTS[function], 2, k_max, alpha=alpha))
    else:
        raise DomainError(f"Unknown function '{function}'.")
    return s.with_terms(min(s.terms, s.max_terms) if s.terms else s.max_terms)


class HolderExperiment(ExperimentBase):
    """Sampled modulus of continuity and its fitted Hölder exponent."""

    name = "holder"
    cli_options = (
        _FUNCTION_OPTION,
        opts.BASE,
        opts.ALPHA,
        _SAMPLES_OPTION,
        opts.SEED,
        click.option("--scale-min", help="Smallest scale delta.", type=click.STRING),
        click.option("--scale-max", help="Largest scale delta.", type=click.STRING),
        opts.TRUNCATION,
    )
    config_jsonschema = PropertiesList(
        _function_property(),
        Property("b", IntegerType, default=2, description="Lacunary base b."),
        Property("alpha", NumberType, default=0.5, description="Hölder exponent."),
        Property("samples", IntegerType, default=10_000, description="Samples per scale."),
        Property("seed", IntegerType, default=0),
        Property("scale_min", NumberType, default=2.0**-20, description="Smallest delta."),
        Property("scale_max", NumberType, default=0.25, description="Largest delta."),
        Property("k", DyadicIntegerType, default=2**40, description="Truncation of lifts."),
    ).to_dict()
    output_schema = PropertiesList(
        Property("delta", NumberType),
        Property("omega", NumberType),
    ).to_dict()

    def run(self) -> ExperimentResult:
        """Rows (delta, omega); the document adds the fitted exponent."""
        function = self.config["function"]
        s = build_lacunary(function, int(self.config["b"]), self.config["alpha"], self.config["k"])
        lo, hi = float(self.config["scale_min"]), float(self.config["scale_max"])
        if not lo < hi:
            raise DomainError(f"Need scale_min < scale_max, got {lo} and {hi}.")
        scales = [d for d in DEFAULT_SCALES if lo * (1 - 1e-12) <= d <= hi * (1 + 1e-12)]
        if len(scales) < 3:
            raise DomainError("The scale range must contain at least three dyadic scales.")
        table = holder_modulus(
            s,
            scales=scales,
            sample_count=int(self.config["samples"]),
            seed=int(self.config["seed"]),
            n_jobs=int(self.config["n_jobs"]),
        )
        self.logger.info(
            "Fitted exponent %.4f (R^2 %.4f) for %s.", table.slope, table.r_squared, function
        )
        rows = table.to_rows()
        document = {
            "function": function,
            "b": s.base,
            "terms": s.terms,
            "slope": table.slope,
            "intercept": table.intercept,
            "r_squared": table.r_squared,
            "fitted_range": list(table.fitted_range),
            "rows": rows,
        }
        return ExperimentResult(rows=rows, document=document)


class FourierExperiment(ExperimentBase):
    """Windowed decay certificate |c_k| <= C k^-alpha from N periodic samples."""

    name = "fourier"
    cli_options = (
        _FUNCTION_OPTION,
        opts.BASE,
        click.option("--N", help="Sample count, a power of two.", type=click.STRING),
        opts.ALPHA,
        click.option(
            "--function-alpha", help="Exponent of the sampled function.", type=click.STRING
        ),
        opts.TRUNCATION,
    )
    config_jsonschema = PropertiesList(
        _function_property("hardy"),
        Property("b", IntegerType, default=2, description="Lacunary base b."),
        Property(
            "n",
            DyadicIntegerType,
            default=2**18,
            description="Sample count N, a power of two.",
        ),
        Property("alpha", NumberType, default=0.5, description="Certified decay exponent."),
        Property(
            "function_alpha",
            NumberType,
            default=0.5,
            description="Exponent of the Weierstrass function or of the anyn_holder lift.",
        ),
        Property("k", DyadicIntegerType, default=2**40, description="Truncation of lifts."),
    ).to_dict()
    output_schema = PropertiesList(
        Property("window", IntegerType),
        Property("k_lo", IntegerType),
        Property("k_hi", IntegerType),
        Property("C", NumberType),
        Property("sup_C", NumberType),
    ).to_dict()

    def run(self) -> ExperimentResult:
        """Window rows; the document adds the verdict and recovered lacunary coefficients."""
        count = int(self.config["n"])
        s = build_lacunary(
            self.config["function"],
            int(self.config["b"]),
            self.config["function_alpha"],
            self.config["k"],
        )
        samples, tail = s.sample_periodic(count)
        certificate = fourier_decay_certificate(samples, float(self.config["alpha"]))
        recovered: List[Dict[str, Any]] = []
        j = int(s.start)
        while j < int(s.start) + s.terms and s.base**j <= count // 4:
            k = s.base**j
            value = float(certificate.coefficients[k])
            expected = s.amplitude(j)
            recovered.append(
                {"j": j, "k": k, "c_k": value, "expected": expected, "error": abs(value - expected)}
            )
            j += 1
        self.logger.info(
            "Fourier certificate for %s at alpha=%s: %s.",
            self.config["function"],
            self.config["alpha"],
            certificate.verdict,
        )
        rows = certificate.to_rows()
        document = {
            "function": self.config["function"],
            "alpha": certificate.alpha,
            "samples": count,
            "sampling_tail_bound": tail,
            "verdict": str(certificate.verdict),
            "growth_exponent": certificate.growth_exponent,
            "windows": rows,
            "recovered": recovered,
        }
        return ExperimentResult(rows=rows, document=document)


class WeierstrassExperiment(ExperimentBase):
    """Evaluate a lacunary series with certified tails and test the Hölder constant."""

    name = "weierstrass"
    cli_options = (
        opts.BASE,
        opts.ALPHA,
        click.option("--law", help="weierstrass or hardy.", type=click.STRING),
        click.option("--t", help="Comma list of points t.", type=click.STRING),
        opts.TOLERANCE,
        _SAMPLES_OPTION,
        opts.SEED,
        click.option("--check/--no-check", default=True, help="Run the Hölder ratio check."),
    )
    config_jsonschema = PropertiesList(
        Property("b", IntegerType, default=2, description="Base b >= 2."),
        Property("alpha", NumberType, default=0.5, description="Exponent in (0, 1)."),
        Property(
            "law",
            StringType,
            default="weierstrass",
            allowed_values=[law.value for law in AmplitudeLaw],
            description="Amplitude law.",
        ),
        Property("t", ArrayType(NumberType), default=[0.0], description="Evaluation points."),
        Property("tol", NumberType, default=1e-10, description="Tail tolerance."),
        Property("samples", IntegerType, default=100_000, description="Hölder ratio samples."),
        Property("seed", IntegerType, default=0),
        Property("check", BooleanType, default=True, description="Run the Hölder ratio check."),
    ).to_dict()
    output_schema = PropertiesList(
        Property("t", NumberType),
        Property("value", NumberType),
        Property("tail_bound", NumberType),
        Property("terms", IntegerType),
    ).to_dict()

    def run(self) -> ExperimentResult:
        """One row per t; fails when a sampled ratio exceeds the proven constant."""
        law = AmplitudeLaw(self.config["law"])
        b = int(self.config["b"])
        alpha = float(self.config["alpha"])
        s = LacunaryCosineSeries(
            b, law, alpha=alpha if law is AmplitudeLaw.WEIERSTRASS else None
        )
        tol = float(self.config["tol"])
        rows = []
        for t in self.config["t"]:
            evaluation = lacunary_eval(s, float(t), tol)
            rows.append(
                {
                    "t": float(t),
                    "value": evaluation.value,
                    "tail_bound": evaluation.tail_bound,
                    "terms": evaluation.terms,
                }
            )
        document: Dict[str, Any] = {"b": b, "law": str(law), "rows": rows}
        passed = True
        witnesses: List[Any] = []
        if law is AmplitudeLaw.WEIERSTRASS:
            document["alpha"] = alpha
            document["holder_constant"] = holder_bound_constant(b, alpha)
            if self.config["check"]:
                report = holder_ratio_check(
                    s, samples=int(self.config["samples"]), seed=int(self.config["seed"])
                )
                document["holder_check"] = {
                    "max_ratio": report.max_ratio,
                    "constant": report.constant,
                    "samples": report.samples,
                    "witness": {"t": report.witness[0], "delta": report.witness[1]},
                    "pass": report.passed,
                }
                passed = report.passed
                if not passed:
                    witnesses.append(document["holder_check"]["witness"])
        return ExperimentResult(rows=rows, document=document, passed=passed, witnesses=witnesses)


@cached(max_size=8)
def neuheisel_table(k: int, resolution: int) -> np.ndarray:
    """Legendre table of degree k at the polar nodes of the sup-norm grid."""
    polar = (np.arange(resolution) + 0.5) * np.pi / resolution
    table = legendre_table(k, np.cos(polar))
    table.setflags(write=False)
    return table


def _sampled_sup(n: int, k: int, seed: int, resolution: int) -> float:
    harmonic = random_unit_harmonic(n, k, seed)
    if n == 3:
        return estimate_sup_norm(harmonic, resolution, neuheisel_table(k, resolution)).value
    return estimate_sup_norm(harmonic).value


class NeuheiselSampleExperiment(ExperimentBase):
    """Sup norms of random unit harmonics against sqrt(ln k), over several seeds."""

    name = "neuheisel-sample"
    cli_options = (
        opts.DIMENSION,
        click.option("--k", help="Degrees, e.g. 64,256,1024.", type=click.STRING),
        click.option("--seeds", help="Number of seeds per degree.", type=click.STRING),
        click.option("--resolution", help="Grid size for n=3.", type=click.STRING),
    )
    config_jsonschema = PropertiesList(
        dimension_property(3),
        Property(
            "k",
            ArrayType(IntegerType),
            default=[64, 256, 1024],
            description="Degrees k >= 2.",
        ),
        Property("seeds", IntegerType, default=20, description="Seeds 0..seeds-1 per degree."),
        Property(
            "resolution", IntegerType, description="Grid size for n=3 (default max(256, 2k))."
        ),
    ).to_dict()
    output_schema = PropertiesList(
        Property("k", IntegerType),
        Property("median_ratio", NumberType),
        Property("min_ratio", NumberType),
        Property("max_ratio", NumberType),
        Property("median_sup", NumberType),
        Property("bound", NumberType),
    ).to_dict()

    def run(self) -> ExperimentResult:
        """One row per degree; an increasing median ratio is logged, never failed."""
        n = int(self.config["n"])
        seeds = int(self.config["seeds"])
        if seeds < 1:
            raise DomainError(f"Need at least one seed, got {seeds}.")
        rows = []
        for k in self.config["k"]:
            if k < 2:
                raise DomainError(f"ln k needs k >= 2, got {k}.")
            resolution = int(self.config.get("resolution") or max(256, 2 * k))
            sups = np.array(
                Parallel(n_jobs=int(self.config["n_jobs"]))(
                    delayed(_sampled_sup)(n, k, seed, resolution) for seed in range(seeds)
                )
            )
            ratios = sups / math.sqrt(math.log(k))
            rows.append(
                {
                    "k": k,
                    "median_ratio": float(np.median(ratios)),
                    "min_ratio": float(ratios.min()),
                    "max_ratio": float(ratios.max()),
                    "median_sup": float(np.median(sups)),
                    "bound": sup_norm_bound(n, k, HarmonicKind.RANDOM),
                }
            )
            self.logger.debug("Degree %d: median ratio %.4f.", k, rows[-1]["median_ratio"])
        medians = [row["median_ratio"] for row in rows]
        if len(medians) >= 3 and all(a < b for a, b in zip(medians, medians[1:])):
            self.logger.warning(
                "Median sup/sqrt(ln k) increases over every degree: %s.",
                ", ".join(f"{m:.3f}" for m in medians),
            )
        return ExperimentResult(rows=rows, document={"n": n, "seeds": seeds, "rows": rows})
