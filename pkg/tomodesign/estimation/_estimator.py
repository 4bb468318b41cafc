"""Linear unbiased estimator and its quadratic error matrices."""
from dataclasses import dataclass
from typing import Any, Dict, Literal, Optional

import numpy as np
import scipy.linalg

from tomodesign.basis import BlochState, OperatorBasis
from tomodesign.estimation._design import DesignMatrices
from tomodesign.utils._datatype_validation_helper import _assert_basis_order, _assert_probabilities
from tomodesign.utils._tolerances import POSITIVITY_TOL, PROBABILITY_TOL
from tomodesign.utils._types import arr_t
from tomodesign.utils.exceptions import InvalidDimensionError, InvalidStateError, NonEstimatingDirectionError
from tomodesign.utils.utils import handle_issue


@dataclass(frozen=True)
class Estimate:
    """Result of :func:`estimate`.

    Attributes
    ----------
    theta : :class:`~numpy.ndarray`
        estimated unknown coordinates
    state : :class:`~tomodesign.basis.BlochState`
        the full Bloch vector, known coordinates filled in with their declared values
    is_physical : bool
        whether the reconstructed matrix is positive semidefinite
    min_eigenvalue : float
        smallest eigenvalue of the reconstructed matrix

    """

    theta: np.ndarray
    state: BlochState
    is_physical: bool
    min_eigenvalue: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "theta": self.theta.tolist(),
            "state": self.state.to_dict(),
            "is_physical": self.is_physical,
            "min_eigenvalue": self.min_eigenvalue,
        }


@dataclass(frozen=True)
class ErrorMatrices:
    """Outcome covariance ``W`` and mean quadratic error matrix ``V = T⁻¹ W T⁻ᵀ`` at one state."""

    W: np.ndarray  # noqa: N815
    V: np.ndarray  # noqa: N815
    probabilities: np.ndarray
    shots: int = 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "W": self.W.tolist(),
            "V": self.V.tolist(),
            "probabilities": self.probabilities.tolist(),
            "shots": self.shots,
        }


def full_theta(design: DesignMatrices, theta_unknown: np.ndarray) -> np.ndarray:
    """Merge estimated unknown coordinates (shape ``(..., d)``) with the declared known values."""
    theta_unknown = np.asarray(theta_unknown, dtype=float)
    out = np.empty(theta_unknown.shape[:-1] + (len(design.known_mask),))
    out[..., design.known_mask] = design.known_values
    out[..., ~design.known_mask] = theta_unknown
    return out


def estimate(
    design: DesignMatrices,
    frequencies: arr_t,
    basis: Optional[OperatorBasis] = None,
    positivity_tol: float = POSITIVITY_TOL,
    error_handling: Literal["ignore", "warn", "raise"] = "ignore",
) -> Estimate:
    """Invert the design: ``θ̂ = T⁻¹(ν - e)``.

    Estimates whose reconstructed state is not positive are flagged (``is_physical=False``), never projected back
    to the state space.

    Parameters
    ----------
    design : :class:`~tomodesign.estimation.DesignMatrices`
        the design
    frequencies : array_like
        relative frequencies ``ν`` of the ``d`` estimating outcomes
    basis : :class:`~tomodesign.basis.OperatorBasis`, optional
        coordinate basis, resolved from the design's ordering tag if ``None``
    positivity_tol : float, optional
        tolerance of the physicality flag
    error_handling : one of {"ignore", "warn", "raise"}, optional
        what to do besides flagging when the estimate is unphysical. Default: "ignore"

    Returns
    -------
    :class:`~tomodesign.estimation.Estimate`
        the estimate

    Raises
    ------
    :exc:`~tomodesign.utils.exceptions.InvalidProbabilityError`
        if a frequency lies outside ``[0, 1]``

    """
    nu = np.asarray(frequencies, dtype=float).ravel()
    if len(nu) != design.d:
        raise InvalidDimensionError(f"Expected {design.d} frequencies, got {len(nu)}.")
    _assert_probabilities(nu, require_sum_le_one=design.kind == "povm")
    theta = scipy.linalg.solve(design.T, nu - design.offsets)
    state = BlochState(full_theta(design, theta), known_mask=design.known_mask, basis_order=design.basis_order)
    min_ev = state.min_eigenvalue(basis)
    physical = min_ev >= -positivity_tol
    if not physical:
        handle_issue(f"Estimate is unphysical (minimal eigenvalue {min_ev:.3e}).", InvalidStateError, error_handling)
    return Estimate(theta=theta, state=state, is_physical=physical, min_eigenvalue=min_ev)


def qubit_variance(lam: arr_t, theta: arr_t, tol: float = 1e-12) -> float:
    """Variance of the single-effect qubit estimator of ``θ_3``, ``(1 - <λ, θ>²) / λ_3²``.

    Both vectors use the Pauli normalization ``ρ = (I + θ·σ)/2``; the effect is ``(I + λ·σ)/2``.

    Parameters
    ----------
    lam : array_like
        unit measurement direction ``λ``
    theta : array_like
        Bloch vector of the state
    tol : float, optional
        tolerance of the unit-norm check

    Raises
    ------
    :exc:`~tomodesign.utils.exceptions.NonEstimatingDirectionError`
        if ``λ_3 = 0``

    """
    lam = np.asarray(lam, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if lam.shape != (3,) or theta.shape != (3,):
        raise InvalidDimensionError("Both vectors must have three components.")
    if abs(np.linalg.norm(lam) - 1) > tol:
        raise InvalidDimensionError(f"Measurement direction must be a unit vector, got norm {np.linalg.norm(lam)}.")
    if abs(lam[2]) <= tol:
        raise NonEstimatingDirectionError("The direction has no σ3 component and carries no information on θ3.")
    return float((1 - (lam @ theta) ** 2) / lam[2] ** 2)


def covariance_w(p_vec: arr_t, tol: float = PROBABILITY_TOL) -> np.ndarray:
    """Multinomial covariance ``W = diag(p) - p pᵀ`` of the relative frequencies of ``d`` outcomes.

    Raises
    ------
    :exc:`~tomodesign.utils.exceptions.InvalidProbabilityError`
        if an entry lies outside ``[0, 1]`` or the entries sum to more than one

    """
    p_vec = np.atleast_1d(np.asarray(p_vec, dtype=float))
    _assert_probabilities(p_vec, require_sum_le_one=True, tol=tol)
    return np.diag(p_vec) - np.outer(p_vec, p_vec)


def bernoulli_w(p_vec: arr_t, tol: float = PROBABILITY_TOL) -> np.ndarray:
    """Covariance ``diag(p(1 - p))`` of independent two-outcome measurements."""
    p_vec = np.atleast_1d(np.asarray(p_vec, dtype=float))
    _assert_probabilities(p_vec, require_sum_le_one=False, tol=tol)
    return np.diag(p_vec * (1 - p_vec))


def propagate(design: DesignMatrices, w: np.ndarray) -> np.ndarray:
    """Return the symmetrized ``T⁻¹ W T⁻ᵀ``."""
    t_inv = np.linalg.inv(design.T)
    v = t_inv @ w @ t_inv.T
    return (v + v.T) / 2


def error_matrix(design: DesignMatrices, state: BlochState, shots: int = 1) -> ErrorMatrices:
    """Outcome covariance and mean quadratic error matrix of the estimator at ``state``.

    The probabilities are the exact Born probabilities of ``state`` (including its known block), so ``V`` is the
    covariance of :func:`estimate` for frequencies of ``shots`` repetitions.

    Parameters
    ----------
    design : :class:`~tomodesign.estimation.DesignMatrices`
        the design
    state : :class:`~tomodesign.basis.BlochState`
        the true state
    shots : int, optional
        number of repetitions ``m``; ``W`` and ``V`` scale with ``1/m``

    Raises
    ------
    :exc:`~tomodesign.utils.exceptions.InvalidBasisError`
        if ``state`` and ``design`` use different basis orderings

    """
    if state.dim != design.dim:
        raise InvalidDimensionError(f"State dimension {state.dim} does not match design dimension {design.dim}.")
    _assert_basis_order(state.basis_order, design.basis_order)
    if shots < 1:
        raise ValueError(f"'shots' must be positive, got {shots}.")
    p = design.full_probabilities(state.theta)
    w = covariance_w(p) if design.kind == "povm" else bernoulli_w(p)
    w = w / shots
    return ErrorMatrices(W=w, V=propagate(design, w), probabilities=p, shots=shots)
