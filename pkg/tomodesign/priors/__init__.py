"""Invariant priors, prior-averaged error matrices and closed-form objectives."""
from tomodesign.priors._closed_forms import (
    PartialObjectives,
    SymmetricOptimum,
    minimize_symmetric_objective,
    partial_b_bound,
    qubit_partial_objectives,
    symmetric_feasible,
    symmetric_grid,
    symmetric_objective,
)
from tomodesign.priors._objective import (
    ObjectiveReport,
    average_w,
    avg_error_matrix,
    avg_error_matrix_mc,
    determinant,
)
from tomodesign.priors._prior import (
    PRIOR_KINDS,
    InvariantPrior,
    MomentEstimate,
    estimate_moments,
    make_prior,
    map_prior_blocks,
    prior_from_dict,
    sample_states,
    verify_prior_alpha,
)

__all__ = [
    "PRIOR_KINDS",
    "InvariantPrior",
    "MomentEstimate",
    "ObjectiveReport",
    "PartialObjectives",
    "SymmetricOptimum",
    "average_w",
    "avg_error_matrix",
    "avg_error_matrix_mc",
    "determinant",
    "estimate_moments",
    "make_prior",
    "map_prior_blocks",
    "minimize_symmetric_objective",
    "partial_b_bound",
    "prior_from_dict",
    "qubit_partial_objectives",
    "sample_states",
    "symmetric_feasible",
    "symmetric_grid",
    "symmetric_objective",
    "verify_prior_alpha",
]
