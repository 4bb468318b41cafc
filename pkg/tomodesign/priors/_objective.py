"""Prior-averaged error matrices and the determinant objective."""
from dataclasses import dataclass
from typing import Any, Dict, Literal, Optional, Tuple, Union

import numpy as np
import scipy.linalg

from tomodesign.basis import OperatorBasis, get_basis
from tomodesign.estimation import DesignMatrices, as_design, propagate
from tomodesign.measurements import Povm, VonNeumannFamily
from tomodesign.priors._prior import InvariantPrior, map_prior_blocks
from tomodesign.utils._random import grouped_jackknife
from tomodesign.utils._tolerances import DEGENERATE_DET_TOL
from tomodesign.utils._types import arr_t, mask_t

DesignSource = Union[Povm, VonNeumannFamily, DesignMatrices]


@dataclass(frozen=True)
class ObjectiveReport:
    """The prior-averaged error matrix ``<V>`` and its determinant.

    Attributes
    ----------
    avg_cov : :class:`~numpy.ndarray`
        symmetric ``d x d`` matrix ``<V>``
    det_value : float
        ``det <V>``, reported as 0 when ``degenerate``
    method : str
        ``"closed_form"`` or ``"monte_carlo"``
    mc_stderr : float, optional
        jackknife standard error of ``det_value`` (Monte Carlo only)
    degenerate : bool
        whether ``<V>`` has an eigenvalue below the degeneracy threshold
    samples : int, optional
        number of prior samples (Monte Carlo only)
    seed : int, optional
        seed (Monte Carlo only)

    """

    avg_cov: np.ndarray
    det_value: float
    method: Literal["closed_form", "monte_carlo"]
    mc_stderr: Optional[float] = None
    degenerate: bool = False
    samples: Optional[int] = None
    seed: Optional[int] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method,
            "det_value": self.det_value,
            "mc_stderr": self.mc_stderr,
            "degenerate": self.degenerate,
            "samples": self.samples,
            "seed": self.seed,
            "avg_cov": self.avg_cov.tolist(),
        }


def average_w(design: DesignMatrices, mean: np.ndarray, second: np.ndarray) -> np.ndarray:
    """Exact prior average of the outcome covariance from the first two moments of the Bloch vector.

    With ``p = e0 + R θ``, ``<W> = diag(e0 + R m) - (e0 e0ᵀ + e0 (R m)ᵀ + (R m) e0ᵀ + R S Rᵀ)``; only the diagonal
    is kept for von Neumann families.
    """
    e0 = design.base_offsets
    rows = design.full_rows
    shift = rows @ mean
    w = np.diag(e0 + shift) - (np.outer(e0, e0) + np.outer(e0, shift) + np.outer(shift, e0) + rows @ second @ rows.T)
    if design.kind == "von_neumann":
        w = np.diag(np.diag(w))
    return (w + w.T) / 2


def determinant(avg_cov: np.ndarray, degenerate_tol: float = DEGENERATE_DET_TOL) -> Tuple[float, bool]:
    """Return ``(det, degenerate)``; the determinant is 0 if an eigenvalue falls below ``degenerate_tol``."""
    ev = scipy.linalg.eigvalsh(avg_cov)
    if ev[0] < degenerate_tol:
        return 0.0, True
    return float(np.prod(ev)), False


def avg_error_matrix(
    design_source: DesignSource,
    prior: InvariantPrior,
    known_mask: mask_t = None,
    basis: Optional[OperatorBasis] = None,
    known_values: Optional[arr_t] = None,
) -> ObjectiveReport:
    """Closed-form prior average ``<V> = T⁻¹ <W> T⁻ᵀ`` of the single-shot error matrix.

    Parameters
    ----------
    design_source : :class:`~tomodesign.measurements.Povm`, :class:`~tomodesign.measurements.VonNeumannFamily`, or
        :class:`~tomodesign.estimation.DesignMatrices`
        the design
    prior : :class:`~tomodesign.priors.InvariantPrior`
        the prior
    known_mask : None, bool vector, or list of int, optional
        known coordinates (ignored for prebuilt design matrices)
    basis : :class:`~tomodesign.basis.OperatorBasis`, optional
        coordinate basis, the Gell-Mann basis if ``None``
    known_values : array_like, optional
        declared known values; they enter the offsets only and do not change ``<V>``

    Returns
    -------
    :class:`~tomodesign.priors.ObjectiveReport`
        the report with ``method="closed_form"``

    Raises
    ------
    :exc:`~tomodesign.utils.exceptions.SingularDesignError`
        if the design is singular

    """
    design = as_design(design_source, known_mask, basis, known_values)
    basis = basis if basis is not None else get_basis(design.dim, design.basis_order)
    mean, second = prior.moments(basis)
    avg = propagate(design, average_w(design, mean, second))
    det, degenerate = determinant(avg)
    return ObjectiveReport(avg_cov=avg, det_value=det, method="closed_form", degenerate=degenerate)


def avg_error_matrix_mc(
    design_source: DesignSource,
    prior: InvariantPrior,
    known_mask: mask_t = None,
    samples: int = 10_000,
    seed: int = 0,
    basis: Optional[OperatorBasis] = None,
    known_values: Optional[arr_t] = None,
    threads: int = 1,
) -> ObjectiveReport:
    """Monte Carlo prior average of the single-shot error matrix.

    States are drawn from the prior in a fixed block partition (one random stream per block), the outcome
    covariance is averaged entrywise, and the standard error of the determinant is estimated by a delete-one-block
    jackknife. The result is deterministic given ``seed`` and independent of ``threads``.

    Parameters
    ----------
    design_source, prior, known_mask, basis, known_values
        as for :func:`avg_error_matrix`
    samples : int, optional
        number of prior samples, at least 1
    seed : int, optional
        random seed
    threads : int, optional
        number of worker threads

    Returns
    -------
    :class:`~tomodesign.priors.ObjectiveReport`
        the report with ``method="monte_carlo"``

    """
    if samples < 1:
        raise ValueError(f"'samples' must be positive, got {samples}.")
    design = as_design(design_source, known_mask, basis, known_values)
    basis = basis if basis is not None else get_basis(design.dim, design.basis_order)
    rows = design.full_rows
    base = design.base_offsets
    povm = design.kind == "povm"

    def _block_sum(thetas: np.ndarray) -> Tuple[np.ndarray, int]:
        p = base + thetas @ rows.T
        if povm:
            w_sum = np.diag(p.sum(axis=0)) - p.T @ p
        else:
            w_sum = np.diag((p * (1 - p)).sum(axis=0))
        return w_sum, len(thetas)

    results = map_prior_blocks(prior, samples, seed, _block_sum, basis=basis, threads=threads)
    sums = np.array([r[0] for r in results])
    counts = np.array([r[1] for r in results])

    def _det(avg_w: np.ndarray) -> np.ndarray:
        return np.asarray(determinant(propagate(design, avg_w))[0])

    det_value, stderr = grouped_jackknife(sums, counts, _det)
    avg = propagate(design, sums.sum(axis=0) / counts.sum())
    _, degenerate = determinant(avg)
    return ObjectiveReport(
        avg_cov=avg,
        det_value=float(det_value),
        method="monte_carlo",
        mc_stderr=float(stderr),
        degenerate=degenerate,
        samples=samples,
        seed=seed,
    )
