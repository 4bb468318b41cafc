"""Generalized Bloch vectors and conversions from and to density matrices."""
from dataclasses import dataclass
from typing import Any, Dict, Literal, Optional

import numpy as np
import scipy.linalg

from tomodesign.basis._operator_basis import OperatorBasis, as_mask, get_basis
from tomodesign.utils._datatype_validation_helper import (
    _assert_file_extension,
    _assert_is_hermitian,
    _assert_square_matrix,
    _assert_unit_trace,
)
from tomodesign.utils._io import vector_from_json
from tomodesign.utils._tolerances import HERMITIAN_TOL, POSITIVITY_TOL, RANK_ONE_TOL, TRACE_TOL
from tomodesign.utils._types import mask_t, path_t
from tomodesign.utils.exceptions import DesignParseError, InvalidBasisError, InvalidDimensionError
from tomodesign.utils.utils import read_json, to_json_string, write_to_file


class BlochState:
    """State of an ``n``-level system as canonical Bloch vector ``θ_j = Tr(ρ σ_j)``.

    The vector is complemented by a partition into known coordinates (``known_mask``) and unknown ones, the
    latter being the parameters a measurement design has to estimate.

    Parameters
    ----------
    theta : array_like
        real coefficient vector of length ``n² - 1``
    known_mask : None, bool vector, or list of int, optional
        coordinates whose values are known
    basis_order : str, optional
        ordering tag of the basis ``theta`` refers to

    """

    def __init__(self, theta, known_mask: mask_t = None, basis_order: str = "gell-mann"):
        theta = np.array(theta, dtype=float).ravel()
        dim = int(round(np.sqrt(len(theta) + 1)))
        if dim < 2 or dim**2 - 1 != len(theta):
            raise InvalidDimensionError(f"Bloch vector length must be n²-1 for some n >= 2, got {len(theta)}.")
        theta.setflags(write=False)
        mask = as_mask(known_mask, len(theta))
        mask.setflags(write=False)
        self._theta = theta
        self._dim = dim
        self._mask = mask
        self._order = basis_order

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def theta(self) -> np.ndarray:
        return self._theta

    @property
    def known_mask(self) -> np.ndarray:
        return self._mask

    @property
    def basis_order(self) -> str:
        return self._order

    @property
    def norm_sq(self) -> float:
        """Squared Euclidean norm of ``θ``; at most ``(n - 1)/n`` for physical states."""
        return float(self._theta @ self._theta)

    @property
    def known_theta(self) -> np.ndarray:
        return self._theta[self._mask]

    @property
    def unknown_theta(self) -> np.ndarray:
        return self._theta[~self._mask]

    def with_mask(self, known_mask: mask_t) -> "BlochState":
        """Return the same state with another known/unknown partition."""
        return BlochState(self._theta, known_mask=known_mask, basis_order=self._order)

    def min_eigenvalue(self, basis: Optional[OperatorBasis] = None) -> float:
        rho = bloch_to_density(self, basis)
        return float(scipy.linalg.eigvalsh(rho)[0])

    def is_physical(self, basis: Optional[OperatorBasis] = None, tol: float = POSITIVITY_TOL) -> bool:
        """Whether ``I/n + θ·σ`` is positive semidefinite (within ``tol``)."""
        return self.min_eigenvalue(basis) >= -tol

    def __repr__(self) -> str:
        known = np.flatnonzero(self._mask).tolist()
        return f"BlochState(dim={self._dim}, theta={self._theta.tolist()}, known={known})"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dim": self._dim,
            "basis_order": self._order,
            "theta": self._theta.tolist(),
            "known": np.flatnonzero(self._mask).tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BlochState":
        """Create a state from the dictionary written by :meth:`to_dict`."""
        if "theta" not in data:
            raise DesignParseError("state: missing field 'theta'")
        theta = vector_from_json(data["theta"], field="state.theta")
        known = data.get("known", [])
        if not isinstance(known, list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in known):
            raise DesignParseError("state.known: expected a list of coordinate indices")
        return cls(theta, known_mask=known, basis_order=data.get("basis_order", "gell-mann"))


def _resolve_basis(dim: int, order: str, basis: Optional[OperatorBasis]) -> OperatorBasis:
    if basis is None:
        return get_basis(dim, order)
    if basis.dim != dim:
        raise InvalidDimensionError(f"Basis dimension {basis.dim} does not match state dimension {dim}.")
    if basis.order != order:
        raise InvalidBasisError(f"State refers to basis order {order!r} but basis has order {basis.order!r}.")
    return basis


def density_to_bloch(
    rho: np.ndarray,
    basis: Optional[OperatorBasis] = None,
    known_mask: mask_t = None,
    tol: float = HERMITIAN_TOL,
) -> BlochState:
    """Convert a density matrix to its canonical Bloch vector ``θ_j = Tr(ρ σ_j)``.

    Parameters
    ----------
    rho : :class:`~numpy.ndarray`
        Hermitian unit-trace matrix
    basis : :class:`~tomodesign.basis.OperatorBasis`, optional
        coordinate frame, the Gell-Mann basis of matching dimension if ``None``
    known_mask : None, bool vector, or list of int, optional
        coordinates flagged as known in the returned state
    tol : float, optional
        tolerance of the Hermiticity and trace checks

    Returns
    -------
    :class:`~tomodesign.basis.BlochState`
        the Bloch vector

    Raises
    ------
    :exc:`~tomodesign.utils.exceptions.InvalidStateError`
        if ``rho`` is not Hermitian or does not have unit trace
    :exc:`~tomodesign.utils.exceptions.InvalidDimensionError`
        if ``rho`` does not match the basis dimension

    """
    rho = np.asarray(rho, dtype=complex)
    _assert_square_matrix(rho, None if basis is None else basis.dim)
    _assert_is_hermitian(rho, tol=tol)
    _assert_unit_trace(rho, tol=max(tol, TRACE_TOL))
    basis = basis if basis is not None else get_basis(rho.shape[0])
    return BlochState(basis.coefficients(rho), known_mask=known_mask, basis_order=basis.order)


def bloch_to_density(state: BlochState, basis: Optional[OperatorBasis] = None) -> np.ndarray:
    """Return ``I/n + Σ θ_j σ_j``; the result has unit trace by construction."""
    basis = _resolve_basis(state.dim, state.basis_order, basis)
    rho = np.eye(state.dim, dtype=complex) / state.dim + basis.expand(state.theta)
    return (rho + rho.conj().T) / 2


@dataclass(frozen=True)
class PositivityReport:
    """Outcome of :func:`positivity_bound_check`.

    Attributes
    ----------
    is_positive : bool
        whether ``I + g·σ`` is positive semidefinite
    norm_sq : float
        ``‖g‖²``
    bound : float
        the bound ``n² - n`` that ``norm_sq`` never exceeds for positive matrices
    is_rank_one_multiple : bool
        whether ``I + g·σ`` equals ``n`` times a rank-one projection
    min_eigenvalue : float
        smallest eigenvalue of ``I + g·σ``

    """

    is_positive: bool
    norm_sq: float
    bound: float
    is_rank_one_multiple: bool
    min_eigenvalue: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "is_positive": self.is_positive,
            "norm_sq": self.norm_sq,
            "bound": self.bound,
            "is_rank_one_multiple": self.is_rank_one_multiple,
            "min_eigenvalue": self.min_eigenvalue,
        }


def positivity_bound_check(
    g: np.ndarray,
    basis: OperatorBasis,
    positivity_tol: float = POSITIVITY_TOL,
    rank_one_tol: float = RANK_ONE_TOL,
) -> PositivityReport:
    """Check positivity of ``I + g·σ`` and compare ``‖g‖²`` to the bound ``n² - n``.

    Parameters
    ----------
    g : array_like
        coefficient vector of length ``n² - 1`` (``g = n θ`` for a state with canonical Bloch vector ``θ``)
    basis : :class:`~tomodesign.basis.OperatorBasis`
        coordinate frame
    positivity_tol : float, optional
        smallest eigenvalue still counted as non-negative is ``-positivity_tol``
    rank_one_tol : float, optional
        tolerance on the eigenvalues ``{0, ..., 0, n}`` of a rank-one multiple

    Returns
    -------
    :class:`~tomodesign.basis.PositivityReport`
        the report

    """
    g = np.asarray(g, dtype=float).ravel()
    n = basis.dim
    if len(g) != basis.n_params:
        raise InvalidDimensionError(f"Expected {basis.n_params} coefficients, got {len(g)}.")
    m = np.eye(n, dtype=complex) + basis.expand(g)
    ev = scipy.linalg.eigvalsh((m + m.conj().T) / 2)
    rank_one = bool(np.all(np.abs(ev[:-1]) <= rank_one_tol) and abs(ev[-1] - n) <= rank_one_tol)
    return PositivityReport(
        is_positive=bool(ev[0] >= -positivity_tol),
        norm_sq=float(g @ g),
        bound=float(n**2 - n),
        is_rank_one_multiple=rank_one,
        min_eigenvalue=float(ev[0]),
    )


def to_n_scale(theta: np.ndarray, n: int) -> np.ndarray:
    """Convert canonical coordinates to the scaled form ``ρ = (I + g·σ)/n``, i.e. ``g = n θ``."""
    return n * np.asarray(theta, dtype=float)


def from_n_scale(g: np.ndarray, n: int) -> np.ndarray:
    """Inverse of :func:`to_n_scale`."""
    return np.asarray(g, dtype=float) / n


def to_pauli_scale(theta: np.ndarray) -> np.ndarray:
    """Convert canonical qubit coordinates to the Pauli-normalized Bloch vector ``ρ = (I + θ·σ_Pauli)/2``."""
    return np.sqrt(2) * np.asarray(theta, dtype=float)


def from_pauli_scale(theta: np.ndarray) -> np.ndarray:
    """Inverse of :func:`to_pauli_scale`."""
    return np.asarray(theta, dtype=float) / np.sqrt(2)


def state_from_density(
    rho: np.ndarray,
    order: Literal["gell-mann", "pauli-product"] = "gell-mann",
    known_mask: mask_t = None,
) -> BlochState:
    """Shorthand for :func:`density_to_bloch` with the cached basis of the given order."""
    rho = np.asarray(rho, dtype=complex)
    _assert_square_matrix(rho)
    return density_to_bloch(rho, get_basis(rho.shape[0], order), known_mask=known_mask)


def state_to_json(state: BlochState, path: path_t):
    """Write a state (with its known coordinates and basis ordering tag) to a ``*.json`` file."""
    _assert_file_extension(path, ".json")
    write_to_file(path, to_json_string(state.to_dict()))


def state_from_json(path: path_t) -> BlochState:
    """Read a state written by :func:`state_to_json`.

    Raises
    ------
    :exc:`~tomodesign.utils.exceptions.FileExtensionError`
        if ``path`` is not a ``*.json`` file
    :exc:`~tomodesign.utils.exceptions.DesignParseError`
        if the document is malformed

    """
    _assert_file_extension(path, ".json")
    return BlochState.from_dict(read_json(path))
