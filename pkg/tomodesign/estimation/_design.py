"""The affine map from Bloch coordinates to outcome probabilities of a measurement design."""
from dataclasses import dataclass
from typing import Any, Dict, Literal, Optional, Union

import numpy as np

from tomodesign.basis import OperatorBasis, as_mask, get_basis
from tomodesign.measurements import Povm, VonNeumannFamily
from tomodesign.utils._datatype_validation_helper import _assert_basis_order
from tomodesign.utils._tolerances import SINGULAR_TOL
from tomodesign.utils._types import arr_t, mask_t
from tomodesign.utils.exceptions import (
    InvalidDimensionError,
    OvercompleteDesignError,
    SingularDesignError,
    UnderdeterminedDesignError,
    ValidationError,
)


@dataclass(frozen=True)
class DesignMatrices:
    """Affine map ``p = e + T θ`` from the unknown Bloch coordinates to the estimating-outcome probabilities.

    Attributes
    ----------
    offsets : :class:`~numpy.ndarray`
        ``e_i = Tr(E_i)/n`` plus the contribution ``Σ_known Tr(E_i σ_j) θ_j`` of the declared known values
    T : :class:`~numpy.ndarray`
        ``d x d`` matrix ``T_ij = Tr(E_i σ_j)`` over the unknown coordinates ``j``
    base_offsets : :class:`~numpy.ndarray`
        ``Tr(E_i)/n`` without the known-value contribution
    full_rows : :class:`~numpy.ndarray`
        ``d x (n² - 1)`` matrix ``Tr(E_i σ_j)`` over all coordinates
    known_mask : :class:`~numpy.ndarray`
        boolean vector of known coordinates
    known_values : :class:`~numpy.ndarray`
        declared values of the known coordinates
    kind : str
        ``"povm"`` (multinomial outcomes) or ``"von_neumann"`` (independent two-outcome measurements)
    dim : int
        Hilbert space dimension
    basis_order : str
        ordering tag of the coordinate basis

    """

    offsets: np.ndarray
    T: np.ndarray  # noqa: N815
    base_offsets: np.ndarray
    full_rows: np.ndarray
    known_mask: np.ndarray
    known_values: np.ndarray
    kind: Literal["povm", "von_neumann"]
    dim: int
    basis_order: str

    @property
    def d(self) -> int:
        """Number of unknown parameters."""
        return len(self.offsets)

    @property
    def det_t(self) -> float:
        return float(np.linalg.det(self.T))

    def probabilities(self, theta_unknown: arr_t) -> np.ndarray:
        """Return ``e + T θ`` for the unknown block ``θ``."""
        return self.offsets + self.T @ np.asarray(theta_unknown, dtype=float)

    def full_probabilities(self, theta: arr_t) -> np.ndarray:
        """Return the estimating-outcome probabilities of a full Bloch vector, known block included."""
        return self.base_offsets + self.full_rows @ np.asarray(theta, dtype=float)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "dim": self.dim,
            "d": self.d,
            "basis_order": self.basis_order,
            "known": np.flatnonzero(self.known_mask).tolist(),
            "known_values": self.known_values.tolist(),
            "offsets": self.offsets.tolist(),
            "T": self.T.tolist(),
            "det_T": self.det_t,
        }


def _prepare(dim: int, known_mask: mask_t, basis: Optional[OperatorBasis], known_values: Optional[arr_t]):
    basis = basis if basis is not None else get_basis(dim)
    if basis.dim != dim:
        raise InvalidDimensionError(f"Basis dimension {basis.dim} does not match design dimension {dim}.")
    mask = as_mask(known_mask, basis.n_params)
    n_known = int(mask.sum())
    values = np.zeros(n_known) if known_values is None else np.array(known_values, dtype=float).ravel()
    if len(values) != n_known:
        raise InvalidDimensionError(f"Expected {n_known} known values, got {len(values)}.")
    d = basis.n_params - n_known
    if d == 0:
        raise ValidationError("All coordinates are known, nothing to estimate.")
    return basis, mask, values, d


def full_design_rows(matrices: np.ndarray, basis: OperatorBasis) -> np.ndarray:
    """Return ``Re Tr(M_i σ_j)`` for all matrices ``M_i`` and all basis elements ``σ_j``."""
    return np.einsum("kij,lji->kl", np.asarray(matrices, dtype=complex), basis.elements).real


def _assemble(
    matrices: np.ndarray,
    basis: OperatorBasis,
    mask: np.ndarray,
    values: np.ndarray,
    kind: str,
    singular_tol: float,
) -> DesignMatrices:
    dim = basis.dim
    rows = full_design_rows(matrices, basis)
    base = np.trace(matrices, axis1=1, axis2=2).real / dim
    t_matrix = rows[:, ~mask]
    det = np.linalg.det(t_matrix)
    if abs(det) < singular_tol:
        raise SingularDesignError(
            f"Design matrix T is singular (|det T| = {abs(det):.3e}); the design is not informationally complete "
            "for the unknown coordinates."
        )
    for arr in (rows, base, t_matrix, mask, values):
        arr.setflags(write=False)
    return DesignMatrices(
        offsets=base + rows[:, mask] @ values,
        T=t_matrix,
        base_offsets=base,
        full_rows=rows,
        known_mask=mask,
        known_values=values,
        kind=kind,
        dim=dim,
        basis_order=basis.order,
    )


def build_design(
    p: Povm,
    known_mask: mask_t = None,
    basis: Optional[OperatorBasis] = None,
    known_values: Optional[arr_t] = None,
    singular_tol: float = SINGULAR_TOL,
) -> DesignMatrices:
    """Build the design matrices of a POVM whose first ``d`` elements are the estimating outcomes.

    Parameters
    ----------
    p : :class:`~tomodesign.measurements.Povm`
        the POVM with exactly ``d + 1`` elements, ``d`` being the number of unknown coordinates
    known_mask : None, bool vector, or list of int, optional
        known coordinates
    basis : :class:`~tomodesign.basis.OperatorBasis`, optional
        coordinate basis, the Gell-Mann basis if ``None``
    known_values : array_like, optional
        declared values of the known coordinates (zeros if ``None``)
    singular_tol : float, optional
        designs with ``|det T|`` below this value are rejected

    Returns
    -------
    :class:`~tomodesign.estimation.DesignMatrices`
        the design matrices

    Raises
    ------
    :exc:`~tomodesign.utils.exceptions.UnderdeterminedDesignError`
        if the POVM has fewer than ``d + 1`` elements
    :exc:`~tomodesign.utils.exceptions.OvercompleteDesignError`
        if the POVM has more than ``d + 1`` elements
    :exc:`~tomodesign.utils.exceptions.SingularDesignError`
        if ``T`` is singular

    """
    basis, mask, values, d = _prepare(p.dim, known_mask, basis, known_values)
    if p.k < d + 1:
        raise UnderdeterminedDesignError(f"A POVM needs at least {d + 1} elements for {d} unknowns, got {p.k}.")
    if p.k > d + 1:
        raise OvercompleteDesignError(
            f"A POVM with {p.k} elements is over-complete for {d} unknowns; only {d + 1}-element POVMs are supported."
        )
    return _assemble(np.array(p.elements[:d]), basis, mask, values, "povm", singular_tol)


def build_design_vn(
    f: VonNeumannFamily,
    known_mask: mask_t = None,
    basis: Optional[OperatorBasis] = None,
    known_values: Optional[arr_t] = None,
    singular_tol: float = SINGULAR_TOL,
) -> DesignMatrices:
    """Build the design matrices of a von Neumann family with one effect per unknown coordinate.

    Parameters are the same as for :func:`build_design`.

    Raises
    ------
    :exc:`~tomodesign.utils.exceptions.UnderdeterminedDesignError`
        if the family has fewer than ``d`` effects
    :exc:`~tomodesign.utils.exceptions.OvercompleteDesignError`
        if the family has more than ``d`` effects
    :exc:`~tomodesign.utils.exceptions.SingularDesignError`
        if ``T`` is singular

    """
    basis, mask, values, d = _prepare(f.dim, known_mask, basis, known_values)
    if f.k < d:
        raise UnderdeterminedDesignError(f"A von Neumann family needs {d} effects for {d} unknowns, got {f.k}.")
    if f.k > d:
        raise OvercompleteDesignError(f"A von Neumann family needs {d} effects for {d} unknowns, got {f.k}.")
    return _assemble(np.array(f.effects), basis, mask, values, "von_neumann", singular_tol)


def as_design(
    source: Union[Povm, VonNeumannFamily, DesignMatrices],
    known_mask: mask_t = None,
    basis: Optional[OperatorBasis] = None,
    known_values: Optional[arr_t] = None,
) -> DesignMatrices:
    """Return design matrices for a POVM, a von Neumann family, or pass existing design matrices through.

    Existing design matrices ignore ``known_mask`` and ``known_values``; a given ``basis`` must match their
    dimension and ordering.
    """
    if isinstance(source, DesignMatrices):
        if basis is not None:
            if basis.dim != source.dim:
                raise InvalidDimensionError(
                    f"Basis dimension {basis.dim} does not match design dimension {source.dim}."
                )
            _assert_basis_order(basis.order, source.basis_order, context="basis")
        return source
    if isinstance(source, VonNeumannFamily):
        return build_design_vn(source, known_mask, basis, known_values)
    if isinstance(source, Povm):
        return build_design(source, known_mask, basis, known_values)
    raise ValidationError(f"Expected a Povm, VonNeumannFamily or DesignMatrices, got {type(source).__name__}.")
