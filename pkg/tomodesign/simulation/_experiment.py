"""Repeated tomography experiments with Born-rule sampling and their empirical statistics."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
import scipy.linalg

from tomodesign.basis import BlochState, OperatorBasis, get_basis
from tomodesign.estimation import DesignMatrices, as_design, error_matrix, full_theta
from tomodesign.measurements import Povm, VonNeumannFamily, family_probabilities, probabilities
from tomodesign.utils._datatype_validation_helper import _assert_basis_order, _assert_file_extension
from tomodesign.utils._random import block_generators, block_partition, grouped_jackknife
from tomodesign.utils._tolerances import POSITIVITY_TOL
from tomodesign.utils._types import path_t
from tomodesign.utils.exceptions import InvalidDimensionError, InvalidStateError, ValidationError
from tomodesign.utils.utils import handle_issue

_MAX_JACKKNIFE_GROUPS = 50


@dataclass(frozen=True)
class ExperimentSpec:
    """``runs`` independent experiments, each estimating the state from ``shots`` measurements.

    The known coordinates (and their values) are taken from ``true_state``. For a von Neumann family every effect is
    measured on its own batch of ``shots`` copies.

    Attributes
    ----------
    design : :class:`~tomodesign.measurements.Povm` or :class:`~tomodesign.measurements.VonNeumannFamily`
        the measurement design
    true_state : :class:`~tomodesign.basis.BlochState`
        the state that is measured
    shots : int
        copies per run (per effect for von Neumann families), ``m >= 1``
    runs : int
        number of runs, ``N >= 1``
    seed : int
        random seed
    basis : :class:`~tomodesign.basis.OperatorBasis`, optional
        coordinate basis, resolved from the state's ordering tag if ``None``
    threads : int
        worker threads

    """

    design: Union[Povm, VonNeumannFamily]
    true_state: BlochState
    shots: int
    runs: int
    seed: int = 0
    basis: Optional[OperatorBasis] = None
    threads: int = 1

    def __post_init__(self):
        if self.shots < 1 or self.runs < 1:
            raise ValidationError(f"'shots' and 'runs' must be positive, got {self.shots} and {self.runs}.")
        if self.design.dim != self.true_state.dim:
            raise InvalidDimensionError(
                f"State dimension {self.true_state.dim} does not match design dimension {self.design.dim}."
            )
        basis = self.basis if self.basis is not None else get_basis(self.true_state.dim, self.true_state.basis_order)
        _assert_basis_order(self.true_state.basis_order, basis.order, context="true state")
        object.__setattr__(self, "basis", basis)

    def design_matrices(self) -> DesignMatrices:
        return as_design(self.design, self.true_state.known_mask, self.basis, self.true_state.known_theta)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "design": self.design.to_dict(),
            "true_state": self.true_state.to_dict(),
            "shots": self.shots,
            "runs": self.runs,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class EmpiricalReport:
    """Empirical statistics of the estimates of an :class:`ExperimentSpec`.

    Attributes
    ----------
    mean_estimate : :class:`~numpy.ndarray`
        mean of the estimated unknown coordinates
    empirical_cov : :class:`~numpy.ndarray`
        sample covariance of the estimates, ``d x d``
    unphysical_fraction : float
        fraction of runs whose reconstructed matrix is not positive
    mean_stderr : :class:`~numpy.ndarray`
        jackknife standard error of ``mean_estimate``
    cov_stderr : :class:`~numpy.ndarray`
        jackknife standard error of every entry of ``empirical_cov``
    analytic_cov : :class:`~numpy.ndarray`
        ``V/m`` of the design at the true state
    true_theta : :class:`~numpy.ndarray`
        unknown coordinates of the true state
    estimates : :class:`~numpy.ndarray`
        per-run estimates, shape ``(N, d)``
    min_eigenvalues : :class:`~numpy.ndarray`
        per-run smallest eigenvalue of the reconstructed matrix

    """

    mean_estimate: np.ndarray
    empirical_cov: np.ndarray
    unphysical_fraction: float
    mean_stderr: np.ndarray
    cov_stderr: np.ndarray
    analytic_cov: np.ndarray
    true_theta: np.ndarray
    estimates: np.ndarray
    min_eigenvalues: np.ndarray
    shots: int
    runs: int
    seed: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "shots": self.shots,
            "runs": self.runs,
            "seed": self.seed,
            "true_theta": self.true_theta.tolist(),
            "mean_estimate": self.mean_estimate.tolist(),
            "mean_stderr": self.mean_stderr.tolist(),
            "empirical_cov": self.empirical_cov.tolist(),
            "cov_stderr": self.cov_stderr.tolist(),
            "analytic_cov": self.analytic_cov.tolist(),
            "unphysical_fraction": self.unphysical_fraction,
        }

    def to_dataframe(self) -> pd.DataFrame:
        """Return the per-run estimates as a dataframe indexed by ``run``."""
        data = pd.DataFrame(self.estimates, columns=[f"theta_{i}" for i in range(self.estimates.shape[1])])
        data["min_eigenvalue"] = self.min_eigenvalues
        data["is_physical"] = self.min_eigenvalues >= -POSITIVITY_TOL
        data.index.name = "run"
        return data

    def comparison_table(self) -> pd.DataFrame:
        """Return empirical against analytic covariance entries, with the deviation in standard errors."""
        d = len(self.mean_estimate)
        rows, cols = np.triu_indices(d)
        stderr = self.cov_stderr[rows, cols]
        deviation = self.empirical_cov[rows, cols] - self.analytic_cov[rows, cols]
        with np.errstate(divide="ignore", invalid="ignore"):
            z_score = np.where(stderr > 0, deviation / stderr, np.nan)
        return pd.DataFrame(
            {
                "row": rows,
                "col": cols,
                "empirical": self.empirical_cov[rows, cols],
                "analytic": self.analytic_cov[rows, cols],
                "stderr": stderr,
                "z_score": z_score,
            }
        )

    def to_csv(self, path: path_t):
        """Export the per-run estimates to a ``*.csv`` file.

        Raises
        ------
        :exc:`~tomodesign.utils.exceptions.FileExtensionError`
            if ``path`` does not end with ``.csv``

        """
        _assert_file_extension(path, ".csv")
        self.to_dataframe().to_csv(path)


def _sampling_probabilities(spec: ExperimentSpec) -> np.ndarray:
    if isinstance(spec.design, Povm):
        p = np.clip(probabilities(spec.true_state, spec.design, spec.basis), 0, None)
        return p / p.sum()
    return np.clip(family_probabilities(spec.true_state, spec.design, spec.basis), 0, 1)


def _min_eigenvalues(thetas: np.ndarray, basis: OperatorBasis) -> np.ndarray:
    rho = np.eye(basis.dim) / basis.dim + np.einsum("rk,kij->rij", thetas, basis.elements)
    return np.linalg.eigvalsh(rho)[:, 0]


def _run_block(
    spec: ExperimentSpec, design: DesignMatrices, p: np.ndarray, n_runs: int, rng: np.random.Generator
) -> Tuple[np.ndarray, np.ndarray]:
    if design.kind == "povm":
        counts = rng.multinomial(spec.shots, p, size=n_runs)[:, : design.d]
    else:
        counts = rng.binomial(spec.shots, p, size=(n_runs, design.d))
    freq = counts / spec.shots
    estimates = scipy.linalg.solve(design.T, (freq - design.offsets).T).T
    return estimates, _min_eigenvalues(full_theta(design, estimates), spec.basis)


def _moment_statistic(d: int):
    def _stat(mean_z: np.ndarray) -> np.ndarray:
        mean = mean_z[:d]
        second = mean_z[d:].reshape(d, d)
        return np.concatenate([mean, (second - np.outer(mean, mean)).ravel()])

    return _stat


def run_experiments(spec: ExperimentSpec) -> EmpiricalReport:
    """Simulate the experiments of ``spec`` and summarize the estimates.

    Outcomes are drawn from the exact Born probabilities (multinomially for a POVM, binomially per effect for a
    von Neumann family) and inverted with :func:`~tomodesign.estimation.estimate`'s linear map. Runs are split in
    a fixed block partition with one random stream per block, so the report only depends on ``spec``.

    Parameters
    ----------
    spec : :class:`~tomodesign.simulation.ExperimentSpec`
        the experiment

    Returns
    -------
    :class:`~tomodesign.simulation.EmpiricalReport`
        the empirical statistics

    Raises
    ------
    :exc:`~tomodesign.utils.exceptions.SingularDesignError`
        if the design is singular for the state's known coordinates

    """
    design = spec.design_matrices()
    p = _sampling_probabilities(spec)
    blocks = block_partition(spec.runs)
    generators = block_generators(spec.seed, len(blocks))

    def _work(i: int) -> Tuple[np.ndarray, np.ndarray]:
        start, stop = blocks[i]
        return _run_block(spec, design, p, stop - start, generators[i])

    with ThreadPoolExecutor(max_workers=max(1, spec.threads)) as pool:
        results = list(pool.map(_work, range(len(blocks))))
    estimates = np.concatenate([r[0] for r in results])
    min_eigs = np.concatenate([r[1] for r in results])

    d = design.d
    n_runs = len(estimates)
    mean = estimates.mean(axis=0)
    ddof = 1 if n_runs > 1 else 0
    centered = estimates - mean
    cov = np.atleast_2d(centered.T @ centered / (n_runs - ddof))

    products = (estimates[:, :, np.newaxis] * estimates[:, np.newaxis, :]).reshape(n_runs, -1)
    z = np.concatenate([estimates, products], axis=1)
    groups = block_partition(n_runs, _MAX_JACKKNIFE_GROUPS)
    group_sums = np.array([z[a:b].sum(axis=0) for a, b in groups])
    group_counts = np.array([b - a for a, b in groups])
    _, stderr = grouped_jackknife(group_sums, group_counts, _moment_statistic(d))

    return EmpiricalReport(
        mean_estimate=mean,
        empirical_cov=(cov + cov.T) / 2,
        unphysical_fraction=float(np.mean(min_eigs < -POSITIVITY_TOL)),
        mean_stderr=stderr[:d],
        cov_stderr=stderr[d:].reshape(d, d),
        analytic_cov=error_matrix(design, spec.true_state, shots=spec.shots).V,
        true_theta=spec.true_state.unknown_theta,
        estimates=estimates,
        min_eigenvalues=min_eigs,
        shots=spec.shots,
        runs=spec.runs,
        seed=spec.seed,
    )


def unphysical_decay(
    spec: ExperimentSpec,
    shots_list: Sequence[int],
    error_handling: Literal["ignore", "warn", "raise"] = "warn",
) -> List[Tuple[int, float]]:
    """Fraction of unphysical estimates for an increasing number of shots.

    For states strictly inside the state space the fraction decays exponentially in ``m``. States on the boundary
    (smallest eigenvalue at most the positivity tolerance) do not decay; they are reported according to
    ``error_handling`` and simulated anyway.

    Parameters
    ----------
    spec : :class:`~tomodesign.simulation.ExperimentSpec`
        the experiment; its ``shots`` are replaced by every entry of ``shots_list``
    shots_list : list of int
        numbers of shots
    error_handling : one of {"ignore", "warn", "raise"}, optional
        how a boundary state is reported. Default: "warn"

    Returns
    -------
    list of tuple
        ``(m, unphysical_fraction)`` per entry of ``shots_list``

    """
    min_ev = spec.true_state.min_eigenvalue(spec.basis)
    if min_ev <= POSITIVITY_TOL:
        handle_issue(
            f"True state lies on the boundary of the state space (minimal eigenvalue {min_ev:.3e}); "
            "the unphysical fraction is not expected to decay.",
            InvalidStateError,
            error_handling,
        )
    return [(int(m), run_experiments(replace(spec, shots=int(m))).unphysical_fraction) for m in shots_list]
