"""Design matrices, the linear estimator and its error matrices."""
from tomodesign.estimation._design import (
    DesignMatrices,
    as_design,
    build_design,
    build_design_vn,
    full_design_rows,
)
from tomodesign.estimation._estimator import (
    ErrorMatrices,
    Estimate,
    bernoulli_w,
    covariance_w,
    error_matrix,
    estimate,
    full_theta,
    propagate,
    qubit_variance,
)

__all__ = [
    "DesignMatrices",
    "ErrorMatrices",
    "Estimate",
    "as_design",
    "bernoulli_w",
    "build_design",
    "build_design_vn",
    "covariance_w",
    "error_matrix",
    "estimate",
    "full_design_rows",
    "full_theta",
    "propagate",
    "qubit_variance",
]
