"""Optimization problems over measurement designs and their results."""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np

from tomodesign.basis import OperatorBasis, as_mask, get_basis
from tomodesign.measurements import Povm, SicReport, VonNeumannFamily
from tomodesign.priors import InvariantPrior
from tomodesign.utils._types import arr_t, mask_t
from tomodesign.utils.exceptions import (
    InvalidDimensionError,
    OvercompleteDesignError,
    UnderdeterminedDesignError,
    ValidationError,
)

OBJECTIVES = ("det_avg_cov", "abs_det_t")
PARAMETRIZATIONS = ("normalized", "completion")

_MAX_DIM = 8


@dataclass(frozen=True)
class OptimizationProblem:
    """A design search: minimize ``det <V>`` (or maximize ``|det T|``) over POVMs or von Neumann families.

    Attributes
    ----------
    dim : int
        Hilbert space dimension, at most 8
    design_kind : str
        ``"povm"`` or ``"von_neumann"``
    outcomes : int, optional
        number of POVM outcomes ``k``; defaults to ``d + 1``
    spectrum : tuple of float, optional
        common spectrum of the von Neumann effects, required for ``"von_neumann"``
    known_mask : :class:`~numpy.ndarray`
        boolean vector of known coordinates
    known_values : :class:`~numpy.ndarray`
        declared values of the known coordinates (canonical units)
    prior : :class:`~tomodesign.priors.InvariantPrior`, optional
        averaging prior, required for the ``"det_avg_cov"`` objective
    objective : str, optional
        ``"det_avg_cov"`` (default for POVMs) or ``"abs_det_t"`` (default for von Neumann families)
    basis_order : str
        ordering tag of the coordinate basis
    parametrization : str
        POVM parametrization, ``"normalized"`` or ``"completion"``
    seed : int
        random seed of the restarts
    restarts : int
        number of independent restarts
    max_iters : int
        iteration limit of each local search stage
    tol : float
        objective-change tolerance of the convergence test
    threads : int
        worker threads for the restarts

    """

    dim: int
    design_kind: Literal["povm", "von_neumann"] = "povm"
    outcomes: Optional[int] = None
    spectrum: Optional[Tuple[float, ...]] = None
    known_mask: mask_t = None
    known_values: Optional[arr_t] = None
    prior: Optional[InvariantPrior] = None
    objective: Optional[Literal["det_avg_cov", "abs_det_t"]] = None
    basis_order: str = "gell-mann"
    parametrization: Literal["normalized", "completion"] = "normalized"
    seed: int = 0
    restarts: int = 32
    max_iters: int = 5000
    tol: float = 1e-10
    threads: int = 1

    def __post_init__(self):
        if int(self.dim) != self.dim or not 2 <= self.dim <= _MAX_DIM:
            raise InvalidDimensionError(f"Design searches support dimensions 2 to {_MAX_DIM}, got {self.dim}.")
        basis = self.basis
        mask = as_mask(self.known_mask, basis.n_params)
        mask.setflags(write=False)
        object.__setattr__(self, "known_mask", mask)
        n_known = int(mask.sum())
        values = np.zeros(n_known) if self.known_values is None else np.array(self.known_values, dtype=float).ravel()
        if len(values) != n_known:
            raise InvalidDimensionError(f"Expected {n_known} known values, got {len(values)}.")
        values.setflags(write=False)
        object.__setattr__(self, "known_values", values)
        if self.d == 0:
            raise ValidationError("All coordinates are known, nothing to estimate.")

        if self.design_kind == "povm":
            outcomes = self.d + 1 if self.outcomes is None else int(self.outcomes)
            if outcomes < self.d + 1:
                raise UnderdeterminedDesignError(f"A POVM needs at least {self.d + 1} outcomes, got {outcomes}.")
            if outcomes > self.d + 1:
                raise OvercompleteDesignError(f"Only {self.d + 1}-outcome POVMs are supported, got {outcomes}.")
            object.__setattr__(self, "outcomes", outcomes)
            if self.parametrization not in PARAMETRIZATIONS:
                raise ValidationError(f"Unknown parametrization {self.parametrization!r}.")
        elif self.design_kind == "von_neumann":
            if self.spectrum is None:
                raise ValidationError("von Neumann searches need a common 'spectrum'.")
            spectrum = tuple(float(x) for x in self.spectrum)
            if len(spectrum) != self.dim or min(spectrum) < 0 or max(spectrum) > 1:
                raise ValidationError(f"Spectrum must hold {self.dim} values in [0, 1], got {list(spectrum)}.")
            if max(spectrum) - min(spectrum) <= 0:
                raise ValidationError("A constant spectrum gives effects proportional to the identity.")
            object.__setattr__(self, "spectrum", spectrum)
            object.__setattr__(self, "outcomes", self.d)
        else:
            raise ValidationError(f"Unknown design kind {self.design_kind!r}.")

        objective = self.objective or ("det_avg_cov" if self.design_kind == "povm" else "abs_det_t")
        if objective not in OBJECTIVES:
            raise ValidationError(f"Unknown objective {objective!r}. Must be one of {OBJECTIVES}.")
        object.__setattr__(self, "objective", objective)
        if objective == "det_avg_cov":
            if self.prior is None:
                raise ValidationError("The 'det_avg_cov' objective needs a prior.")
            if self.prior.dim != self.dim:
                raise InvalidDimensionError(f"Prior dimension {self.prior.dim} does not match {self.dim}.")
        if self.restarts < 1 or self.max_iters < 1:
            raise ValidationError("'restarts' and 'max_iters' must be positive.")
        if self.tol <= 0:
            raise ValidationError(f"'tol' must be positive, got {self.tol}.")

    @property
    def basis(self) -> OperatorBasis:
        return get_basis(self.dim, self.basis_order)

    @property
    def d(self) -> int:
        """Number of unknown coordinates."""
        return self.dim**2 - 1 - int(np.sum(self.known_mask))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dim": self.dim,
            "design_kind": self.design_kind,
            "outcomes": self.outcomes,
            "spectrum": None if self.spectrum is None else list(self.spectrum),
            "known": np.flatnonzero(self.known_mask).tolist(),
            "known_values": self.known_values.tolist(),
            "prior": None if self.prior is None else self.prior.to_dict(),
            "objective": self.objective,
            "basis_order": self.basis_order,
            "parametrization": self.parametrization,
            "seed": self.seed,
            "restarts": self.restarts,
            "max_iters": self.max_iters,
            "tol": self.tol,
        }


@dataclass(frozen=True)
class StructureReport:
    """Gauge-invariant structure of an optimized design.

    Attributes
    ----------
    sic : :class:`~tomodesign.measurements.SicReport`, optional
        symmetry constants of the rescaled POVM elements (POVMs only)
    max_pairwise_residual : float
        largest quasi-orthogonality residual ``|Tr E_i E_j - Tr E_i Tr E_j / n|`` over pairs of elements
    max_known_residual : float
        largest ``|Tr E_i σ_j|`` over elements and known directions

    """

    sic: Optional[SicReport]
    max_pairwise_residual: float
    max_known_residual: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sic": None if self.sic is None else self.sic.to_dict(),
            "max_pairwise_residual": self.max_pairwise_residual,
            "max_known_residual": self.max_known_residual,
        }


@dataclass(frozen=True)
class OptimizationResult:
    """The best design over all restarts.

    Attributes
    ----------
    design : :class:`~tomodesign.measurements.Povm` or :class:`~tomodesign.measurements.VonNeumannFamily`
        the design
    objective : float
        ``det <V>`` or ``|det T|`` of the design, depending on the problem's objective
    objective_name : str
        ``"det_avg_cov"`` or ``"abs_det_t"``
    iterations : int
        length of the best restart's trace
    converged : bool
        whether the Powell polish of the best restart converged (its own stopping rule, or a last-iteration change
        below ``tol``) and the design is feasible within ``1e-8``
    structure_report : :class:`~tomodesign.optimization.StructureReport`
        structure of the design
    trace : :class:`~numpy.ndarray`
        best-so-far internal objective (log scale) per iteration of the best restart
    restart_objectives : list of float
        final objective of every restart, ``inf``/``0`` for failed restarts
    best_restart : int
        index of the selected restart
    seed : int
        seed of the search

    """

    design: Union[Povm, VonNeumannFamily]
    objective: float
    objective_name: str
    iterations: int
    converged: bool
    structure_report: StructureReport
    trace: np.ndarray
    restart_objectives: List[float] = field(default_factory=list)
    best_restart: int = 0
    seed: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "objective_name": self.objective_name,
            "objective": self.objective,
            "iterations": self.iterations,
            "converged": self.converged,
            "trace_length": len(self.trace),
            "best_restart": self.best_restart,
            "restart_objectives": list(self.restart_objectives),
            "seed": self.seed,
            "structure_report": self.structure_report.to_dict(),
            "design": self.design.to_dict(),
        }

