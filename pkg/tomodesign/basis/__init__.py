"""Operator bases, generalized Bloch vectors and scale conversions."""
from tomodesign.basis._bloch import (
    BlochState,
    PositivityReport,
    bloch_to_density,
    density_to_bloch,
    from_n_scale,
    from_pauli_scale,
    positivity_bound_check,
    state_from_density,
    state_from_json,
    state_to_json,
    to_n_scale,
    to_pauli_scale,
)
from tomodesign.basis._operator_basis import (
    BASIS_ORDERS,
    OperatorBasis,
    as_mask,
    build_basis,
    diagonal_mask,
    get_basis,
    marginal_mask,
    pauli_product_basis,
)
from tomodesign.utils._io import matrix_from_json, matrix_to_json

__all__ = [
    "BASIS_ORDERS",
    "BlochState",
    "OperatorBasis",
    "PositivityReport",
    "as_mask",
    "bloch_to_density",
    "build_basis",
    "density_to_bloch",
    "diagonal_mask",
    "from_n_scale",
    "from_pauli_scale",
    "get_basis",
    "marginal_mask",
    "matrix_from_json",
    "matrix_to_json",
    "pauli_product_basis",
    "positivity_bound_check",
    "state_from_density",
    "state_from_json",
    "state_to_json",
    "to_n_scale",
    "to_pauli_scale",
]
