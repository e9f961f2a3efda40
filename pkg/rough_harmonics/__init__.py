"""Irregular harmonic functions on the unit ball and the numerics to check their regularity."""

from rough_harmonics.harmonics import (
    HarmonicFunction,
    HarmonicKind,
    harmonic_dimension,
    highest_weight_harmonic,
    laplace_beltrami_eigenvalue,
    random_unit_harmonic,
    zonal_harmonic,
)
from rough_harmonics.regularity import (
    classify_sobolev,
    dirichlet_energy_2d,
    fourier_decay_certificate,
    holder_modulus,
    spectral_coefficients,
)
from rough_harmonics.series import (
    BallSeries,
    CoefficientSchedule,
    SeriesVariant,
    build_series,
    eval_ball_series,
    kelvin_transform,
)
from rough_harmonics.sphere import (
    QuadratureRule,
    SpherePoint,
    build_annulus_rule,
    build_sphere_quadrature,
)
from rough_harmonics.transmission import (
    TransmissionInstance,
    TransmissionVariant,
    build_instance,
    verify_instance,
)
from rough_harmonics.weierstrass import (
    AmplitudeLaw,
    LacunaryCosineSeries,
    holder_bound_constant,
    lacunary_eval,
)

__all__ = [
    "AmplitudeLaw",
    "BallSeries",
    "CoefficientSchedule",
    "HarmonicFunction",
    "HarmonicKind",
    "LacunaryCosineSeries",
    "QuadratureRule",
    "SeriesVariant",
    "SpherePoint",
    "TransmissionInstance",
    "TransmissionVariant",
    "build_annulus_rule",
    "build_instance",
    "build_series",
    "build_sphere_quadrature",
    "classify_sobolev",
    "dirichlet_energy_2d",
    "eval_ball_series",
    "fourier_decay_certificate",
    "harmonic_dimension",
    "highest_weight_harmonic",
    "holder_bound_constant",
    "holder_modulus",
    "kelvin_transform",
    "lacunary_eval",
    "laplace_beltrami_eigenvalue",
    "random_unit_harmonic",
    "spectral_coefficients",
    "verify_instance",
    "zonal_harmonic",
]
