"""Search for optimal measurement designs."""
from tomodesign.optimization._optimizer import (
    optimize,
    project_out_known,
    random_feasible_designs,
    structure_report,
    vn_det_t,
)
from tomodesign.optimization._parametrization import PovmParametrization, VonNeumannParametrization, spectrum_pairs
from tomodesign.optimization._problem import (
    OBJECTIVES,
    PARAMETRIZATIONS,
    OptimizationProblem,
    OptimizationResult,
    StructureReport,
)

__all__ = [
    "OBJECTIVES",
    "PARAMETRIZATIONS",
    "OptimizationProblem",
    "OptimizationResult",
    "PovmParametrization",
    "StructureReport",
    "VonNeumannParametrization",
    "optimize",
    "project_out_known",
    "random_feasible_designs",
    "spectrum_pairs",
    "structure_report",
    "vn_det_t",
]
