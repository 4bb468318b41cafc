"""Multi-start derivative-free search for measurement designs."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Literal, Optional, Union

import numpy as np
import scipy.optimize

from tomodesign.basis import OperatorBasis, as_mask, get_basis
from tomodesign.estimation import build_design, build_design_vn, full_design_rows, propagate
from tomodesign.measurements import (
    Povm,
    VonNeumannFamily,
    check_sic,
    known_direction_residuals,
    pairwise_quasi_orthogonality,
    validate_family,
    validate_povm,
)
from tomodesign.optimization._parametrization import PovmParametrization, VonNeumannParametrization
from tomodesign.optimization._problem import OptimizationProblem, OptimizationResult, StructureReport
from tomodesign.priors import average_w
from tomodesign.utils._random import block_generators, haar_unitaries
from tomodesign.utils._tolerances import DEGENERATE_DET_TOL
from tomodesign.utils._types import mask_t
from tomodesign.utils.exceptions import (
    DegenerateElementError,
    DesignError,
    InfeasibleDesignError,
    InvalidDimensionError,
)
from tomodesign.utils.utils import handle_issue

_FEASIBILITY_TOL = 1e-8
_START_ATTEMPTS = 100


@dataclass
class _RestartOutcome:
    value: float
    x: Optional[np.ndarray]
    trace: np.ndarray
    converged: bool = False


def _make_parametrization(problem: OptimizationProblem) -> Union[PovmParametrization, VonNeumannParametrization]:
    if problem.design_kind == "povm":
        return PovmParametrization(problem.dim, problem.outcomes, problem.parametrization)
    return VonNeumannParametrization(problem.dim, problem.d, problem.spectrum)


def _to_design(param, x: np.ndarray) -> Optional[Union[Povm, VonNeumannFamily]]:
    if isinstance(param, VonNeumannParametrization):
        return VonNeumannFamily(param.effects(x))
    elements = param.elements(x)
    if elements is None or param.completion_margin(elements) < 0:
        return None
    return Povm(elements)


def _objective_function(problem: OptimizationProblem, param) -> Callable[[np.ndarray], float]:
    """Internal objective: ``log det <V>`` or ``-log |det T|``, ``inf`` where the design is unusable."""
    basis = problem.basis
    if problem.objective == "det_avg_cov":
        mean, second = problem.prior.moments(basis)
    barrier = 1e-9 if getattr(param, "mode", None) == "completion" else 0.0

    def _f(x: np.ndarray) -> float:
        design = _to_design(param, x)
        if design is None:
            return float("inf")
        try:
            if isinstance(design, Povm):
                matrices = build_design(design, problem.known_mask, basis, problem.known_values)
            else:
                matrices = build_design_vn(design, problem.known_mask, basis, problem.known_values)
        except DesignError:
            return float("inf")
        if problem.objective == "abs_det_t":
            value = -float(np.log(abs(matrices.det_t)))
        else:
            avg = propagate(matrices, average_w(matrices, mean, second))
            ev = np.linalg.eigvalsh(avg)
            if ev[0] < DEGENERATE_DET_TOL:
                return float("inf")
            value = float(np.sum(np.log(ev)))
        if barrier:
            value -= barrier * np.log(max(param.completion_margin(design.elements), 1e-300))
        return value

    return _f


def _feasible_start(param, f: Callable[[np.ndarray], float], rng: np.random.Generator) -> Optional[np.ndarray]:
    for _ in range(_START_ATTEMPTS):
        x0 = param.random(rng)
        if np.isfinite(f(x0)):
            return x0
    return None


def _run_restart(problem: OptimizationProblem, rng: np.random.Generator) -> _RestartOutcome:
    param = _make_parametrization(problem)
    f = _objective_function(problem, param)
    x0 = _feasible_start(param, f, rng)
    if x0 is None:
        return _RestartOutcome(value=float("inf"), x=None, trace=np.zeros(0))

    trace: List[float] = []

    def _record(xk: np.ndarray, *args):
        value = f(xk)
        trace.append(min(value, trace[-1]) if trace else value)

    res = scipy.optimize.minimize(
        f,
        x0,
        method="Nelder-Mead",
        callback=_record,
        options={
            "maxiter": problem.max_iters,
            "maxfev": 4 * problem.max_iters,
            "xatol": 1e-10,
            "fatol": problem.tol,
            "adaptive": True,
        },
    )
    x = res.x if f(res.x) <= f(x0) else x0
    polish_start = len(trace)
    polished = scipy.optimize.minimize(
        f,
        x,
        method="Powell",
        callback=_record,
        options={"maxiter": problem.max_iters, "xtol": 1e-10, "ftol": problem.tol},
    )
    if f(polished.x) <= f(x):
        x = polished.x
    converged = _polish_converged(polished, trace[polish_start:], problem.tol)
    return _RestartOutcome(value=f(x), x=np.asarray(x), trace=np.array(trace), converged=converged)


def _feasibility_violations(design: Union[Povm, VonNeumannFamily]) -> list:
    if isinstance(design, Povm):
        return validate_povm(design, positivity_tol=_FEASIBILITY_TOL, completeness_tol=_FEASIBILITY_TOL)
    return validate_family(design, positivity_tol=_FEASIBILITY_TOL)


def structure_report(
    design: Union[Povm, VonNeumannFamily], known_mask: mask_t = None, basis: Optional[OperatorBasis] = None
) -> StructureReport:
    """Collect the gauge-invariant structure of a design (symmetry constants and quasi-orthogonality residuals)."""
    basis = basis if basis is not None else get_basis(design.dim)
    matrices = design.elements if isinstance(design, Povm) else design.effects
    sic = None
    if isinstance(design, Povm):
        try:
            sic = check_sic(design, known_mask=known_mask, basis=basis)
        except DegenerateElementError:
            sic = None
    pairwise = pairwise_quasi_orthogonality(matrices)
    known = known_direction_residuals(matrices, known_mask, basis)
    return StructureReport(
        sic=sic,
        max_pairwise_residual=float(pairwise.max()),
        max_known_residual=float(known.max()) if known.size else 0.0,
    )


def _polish_converged(result: scipy.optimize.OptimizeResult, polish_trace: List[float], tol: float) -> bool:
    """Powell met its own stopping rule, or its last iteration moved the objective by less than ``tol``."""
    if not np.isfinite(result.fun):
        return False
    if result.success:
        return True
    return len(polish_trace) >= 2 and polish_trace[-2] - polish_trace[-1] < tol


def optimize(
    problem: OptimizationProblem, error_handling: Literal["ignore", "warn", "raise"] = "warn"
) -> OptimizationResult:
    """Search for the design with the smallest ``det <V>`` (or the largest ``|det T|``).

    Each restart draws a feasible starting point from its own random stream, runs an adaptive Nelder-Mead simplex
    search and polishes the result with Powell's method. The internal objective is ``log det <V>`` (or
    ``-log |det T|``), with infeasible or singular designs mapped to ``inf``. The best restart wins; ties go to the
    lower restart index, so the result is reproducible for a given problem and independent of ``threads``.

    Parameters
    ----------
    problem : :class:`~tomodesign.optimization.OptimizationProblem`
        the problem
    error_handling : one of {"ignore", "warn", "raise"}, optional
        how a non-converged best restart is reported. Default: "warn"

    Returns
    -------
    :class:`~tomodesign.optimization.OptimizationResult`
        the best design with its structure report

    Raises
    ------
    :exc:`~tomodesign.utils.exceptions.InfeasibleDesignError`
        if no restart found a usable design

    """
    generators = block_generators(problem.seed, problem.restarts)
    with ThreadPoolExecutor(max_workers=max(1, problem.threads)) as pool:
        outcomes = list(pool.map(lambda rng: _run_restart(problem, rng), generators))

    values = [o.value for o in outcomes]
    best = int(np.argmin(values))
    if not np.isfinite(values[best]):
        raise InfeasibleDesignError(
            f"None of the {problem.restarts} restarts found a non-singular feasible design for {problem.d} unknowns."
        )
    outcome = outcomes[best]
    design = _to_design(_make_parametrization(problem), outcome.x)
    converged = outcome.converged and not _feasibility_violations(design)
    if not converged:
        handle_issue(
            f"Best restart ({best}) did not meet the convergence criterion; objective {values[best]:.6g}.",
            DesignError,
            error_handling,
        )

    def _external(v: float) -> float:
        if not np.isfinite(v):
            return 0.0 if problem.objective == "abs_det_t" else float("inf")
        return float(np.exp(-v)) if problem.objective == "abs_det_t" else float(np.exp(v))

    return OptimizationResult(
        design=design,
        objective=_external(values[best]),
        objective_name=problem.objective,
        iterations=len(outcome.trace),
        converged=converged,
        structure_report=structure_report(design, problem.known_mask, problem.basis),
        trace=outcome.trace,
        restart_objectives=[_external(v) for v in values],
        best_restart=best,
        seed=problem.seed,
    )


def vn_det_t(f: VonNeumannFamily, known_mask: mask_t = None, basis: Optional[OperatorBasis] = None) -> float:
    """Return ``|det T|`` of a von Neumann family, 0 for a singular design.

    Raises
    ------
    :exc:`~tomodesign.utils.exceptions.InvalidDimensionError`
        if the family does not have one effect per unknown coordinate

    """
    basis = basis if basis is not None else get_basis(f.dim)
    mask = as_mask(known_mask, basis.n_params)
    d = int((~mask).sum())
    if f.k != d:
        raise InvalidDimensionError(f"Expected {d} effects for {d} unknowns, got {f.k}.")
    rows = full_design_rows(f.effects, basis)[:, ~mask]
    return float(abs(np.linalg.det(rows)))


def project_out_known(
    f: VonNeumannFamily, known_mask: mask_t, basis: Optional[OperatorBasis] = None
) -> VonNeumannFamily:
    """Remove the components along the known directions from every effect, ``E - Σ_known Tr(E σ_j) σ_j``.

    The projected effects keep their traces but may leave the set of positive contractions.
    """
    basis = basis if basis is not None else get_basis(f.dim)
    mask = as_mask(known_mask, basis.n_params)
    known = basis.elements[mask]
    coeffs = full_design_rows(f.effects, basis)[:, mask]
    return VonNeumannFamily(f.effects - np.einsum("ik,kab->iab", coeffs, known))


def random_feasible_designs(
    problem: OptimizationProblem, count: int, seed: int = 0
) -> List[Union[Povm, VonNeumannFamily]]:
    """Draw random designs of the problem's shape (reference population of the statistical optimality check).

    POVMs come from random points of the problem's parametrization; von Neumann families conjugate the spectral
    template with Haar-random unitaries.
    """
    rng = np.random.default_rng(seed)
    if problem.design_kind == "von_neumann":
        u = haar_unitaries(problem.dim, count * problem.d, rng)
        template = np.asarray(problem.spectrum)
        effects = (u * template[np.newaxis, np.newaxis, :]) @ np.conj(np.swapaxes(u, 1, 2))
        return [VonNeumannFamily(e) for e in effects.reshape(count, problem.d, problem.dim, problem.dim)]
    param = _make_parametrization(problem)
    out: List[Union[Povm, VonNeumannFamily]] = []
    while len(out) < count:
        design = _to_design(param, param.random(rng))
        if design is not None:
            out.append(design)
    return out
