"""Measurement designs: POVMs, von Neumann families, structure checks and reference constructions."""
from tomodesign.measurements._constructions import (
    QUTRIT_EXPONENTS,
    TWO_QUBIT_PAIRS,
    computational_basis,
    eigenbasis,
    fourier_basis,
    povm_from_exponents,
    projective_povm,
    qubit_projection,
    qutrit_conditional_sic,
    tetrahedron_povm,
    trine_povm,
    two_qubit_optimal_family,
)
from tomodesign.measurements._io import (
    Design,
    design_from_dict,
    design_to_json,
    family_from_dict,
    family_from_json,
    family_to_json,
    load_design,
    povm_from_dict,
    povm_from_json,
    povm_to_json,
)
from tomodesign.measurements._povm import (
    Povm,
    Violation,
    VonNeumannFamily,
    family_probabilities,
    probabilities,
    validate_family,
    validate_povm,
)
from tomodesign.measurements._structure import (
    MubReport,
    QuasiOrthogonalityReport,
    SicReport,
    check_mub,
    check_quasi_orthogonal,
    check_sic,
    known_direction_residuals,
    pairwise_quasi_orthogonality,
    quasi_orthogonality_residual,
)

__all__ = [
    "QUTRIT_EXPONENTS",
    "TWO_QUBIT_PAIRS",
    "Design",
    "MubReport",
    "Povm",
    "QuasiOrthogonalityReport",
    "SicReport",
    "Violation",
    "VonNeumannFamily",
    "check_mub",
    "check_quasi_orthogonal",
    "check_sic",
    "computational_basis",
    "design_from_dict",
    "design_to_json",
    "eigenbasis",
    "family_from_dict",
    "family_from_json",
    "family_probabilities",
    "family_to_json",
    "fourier_basis",
    "known_direction_residuals",
    "load_design",
    "pairwise_quasi_orthogonality",
    "povm_from_dict",
    "povm_from_exponents",
    "povm_from_json",
    "povm_to_json",
    "probabilities",
    "projective_povm",
    "quasi_orthogonality_residual",
    "qubit_projection",
    "qutrit_conditional_sic",
    "tetrahedron_povm",
    "trine_povm",
    "two_qubit_optimal_family",
    "validate_family",
    "validate_povm",
]
