"""Explicit solutions of the nonlinear transmission examples and their verification."""

from rough_harmonics.transmission.core import (
    DEFAULT_TRUNCATION,
    Condition3Report,
    ConditionCheck,
    F_G_eval,
    GrowthCertificate,
    PhiEvaluation,
    TransmissionInstance,
    TransmissionVariant,
    build_instance,
    certify_growth,
    classical_jump,
    condition3_check,
    default_theta_grid,
    h_eval,
    invert_id_plus_F,
    outer_dirichlet_data,
    phi_eval,
    psi_eval,
    solve_id_plus_psi,
)
from rough_harmonics.transmission.pairing import (
    BumpTestFunction,
    PairingResult,
    PairingRules,
    default_bumps,
    pairing_rules,
    weak_jump_pairing,
)
from rough_harmonics.transmission.verification import (
    VerificationReport,
    first_axis_diagnostic,
    inversion_diagnostic,
    verify_instance,
)

__all__ = [
    "DEFAULT_TRUNCATION",
    "BumpTestFunction",
    "Condition3Report",
    "ConditionCheck",
    "F_G_eval",
    "GrowthCertificate",
    "PairingResult",
    "PairingRules",
    "PhiEvaluation",
    "TransmissionInstance",
    "TransmissionVariant",
    "VerificationReport",
    "build_instance",
    "certify_growth",
    "classical_jump",
    "condition3_check",
    "default_bumps",
    "default_theta_grid",
    "first_axis_diagnostic",
    "h_eval",
    "invert_id_plus_F",
    "inversion_diagnostic",
    "outer_dirichlet_data",
    "pairing_rules",
    "phi_eval",
    "psi_eval",
    "solve_id_plus_psi",
    "verify_instance",
    "weak_jump_pairing",
]
