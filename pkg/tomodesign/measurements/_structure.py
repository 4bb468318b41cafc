"""Structure checks: complementarity, quasi-orthogonality and (conditional) SIC properties."""
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np
import scipy.linalg

from tomodesign.basis import OperatorBasis, as_mask, get_basis
from tomodesign.measurements._povm import Povm
from tomodesign.utils._datatype_validation_helper import _assert_square_matrix
from tomodesign.utils._tolerances import ORTHONORMAL_TOL, QUASI_ORTH_TOL, RANK_ONE_TOL
from tomodesign.utils._types import mask_t
from tomodesign.utils.exceptions import DegenerateElementError, InvalidBasisError, InvalidDimensionError

# eigenvalues below this are treated as an all-zero POVM element
_ZERO_ELEMENT_TOL = 1e-14


@dataclass(frozen=True)
class MubReport:
    is_complementary: bool
    max_deviation: float

    def to_dict(self) -> Dict[str, Any]:
        return {"is_complementary": self.is_complementary, "max_deviation": self.max_deviation}


@dataclass(frozen=True)
class QuasiOrthogonalityReport:
    holds: bool
    residual: float

    def to_dict(self) -> Dict[str, Any]:
        return {"holds": self.holds, "residual": self.residual}


@dataclass(frozen=True)
class SicReport:
    """Symmetry constants of a POVM after rescaling its elements to candidate projections ``P_i``.

    Attributes
    ----------
    k : int
        number of elements
    lambda_ : float
        fitted constant of ``Σ P_i = λ I``
    mu : float
        mean of the pairwise traces ``Tr P_i P_j`` (``i != j``)
    max_lambda_residual : float
        entrywise maximum of ``|Σ P_i - λ I|``
    max_mu_residual : float
        maximum of ``|Tr P_i P_j - μ|``
    all_rank_one : bool
        whether every ``P_i`` is a rank-one projection
    quasi_orthogonal_to_known : bool
        whether every ``P_i`` is traceless-orthogonal to all known basis directions (``True`` for empty masks)
    max_known_residual : float
        maximum of ``|Tr P_i σ_j|`` over the known directions ``σ_j``

    """

    k: int
    lambda_: float
    mu: float
    max_lambda_residual: float
    max_mu_residual: float
    all_rank_one: bool
    quasi_orthogonal_to_known: bool
    max_known_residual: float = 0.0

    def is_symmetric(self, tol: float = 1e-8) -> bool:
        """Whether ``Σ P_i ∝ I`` and all pairwise traces agree within ``tol``."""
        return self.max_lambda_residual <= tol and self.max_mu_residual <= tol and self.all_rank_one

    def to_dict(self) -> Dict[str, Any]:
        return {
            "k": self.k,
            "lambda": self.lambda_,
            "mu": self.mu,
            "max_lambda_residual": self.max_lambda_residual,
            "max_mu_residual": self.max_mu_residual,
            "all_rank_one": self.all_rank_one,
            "quasi_orthogonal_to_known": self.quasi_orthogonal_to_known,
            "max_known_residual": self.max_known_residual,
        }


def _assert_orthonormal_family(vectors: np.ndarray, name: str, tol: float) -> np.ndarray:
    vectors = np.asarray(vectors, dtype=complex)
    _assert_square_matrix(vectors)
    deviation = float(np.max(np.abs(vectors.conj().T @ vectors - np.eye(len(vectors)))))
    if deviation > tol:
        raise InvalidBasisError(f"{name} is not an orthonormal basis (deviation {deviation:.2e}).")
    return vectors


def check_mub(basis_a: np.ndarray, basis_b: np.ndarray, tol: float = QUASI_ORTH_TOL) -> MubReport:
    """Check whether two orthonormal bases of ``C^n`` are mutually unbiased, ``|<e_i, f_j>|² = 1/n``.

    Parameters
    ----------
    basis_a, basis_b : :class:`~numpy.ndarray`
        ``n x n`` matrices whose columns are the basis vectors
    tol : float, optional
        maximal admissible deviation of an overlap from ``1/n``

    Raises
    ------
    :exc:`~tomodesign.utils.exceptions.InvalidBasisError`
        if a family is not orthonormal
    :exc:`~tomodesign.utils.exceptions.InvalidDimensionError`
        if the dimensions differ

    """
    a = _assert_orthonormal_family(basis_a, "basis_a", ORTHONORMAL_TOL)
    b = _assert_orthonormal_family(basis_b, "basis_b", ORTHONORMAL_TOL)
    if a.shape != b.shape:
        raise InvalidDimensionError(f"Bases have different dimensions: {a.shape} vs. {b.shape}.")
    overlaps = np.abs(a.conj().T @ b) ** 2
    deviation = float(np.max(np.abs(overlaps - 1 / len(a))))
    return MubReport(is_complementary=deviation <= tol, max_deviation=deviation)


def quasi_orthogonality_residual(a: np.ndarray, b: np.ndarray) -> float:
    """Return ``|Tr(ab) - Tr(a) Tr(b) / n|``."""
    n = a.shape[0]
    return float(abs(np.trace(a @ b) - np.trace(a) * np.trace(b) / n))


def check_quasi_orthogonal(a: np.ndarray, b: np.ndarray, tol: float = QUASI_ORTH_TOL) -> QuasiOrthogonalityReport:
    """Check ``Tr(ab) = Tr(a) Tr(b) / n``, i.e. Hilbert-Schmidt orthogonality of the traceless parts."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    _assert_square_matrix(a)
    _assert_square_matrix(b, a.shape[0])
    residual = quasi_orthogonality_residual(a, b)
    return QuasiOrthogonalityReport(holds=residual <= tol, residual=residual)


def pairwise_quasi_orthogonality(matrices: np.ndarray) -> np.ndarray:
    """Return the symmetric matrix of quasi-orthogonality residuals of all pairs (zero diagonal)."""
    matrices = np.asarray(matrices, dtype=complex)
    n = matrices.shape[1]
    traces = np.trace(matrices, axis1=1, axis2=2)
    gram = np.einsum("aij,bji->ab", matrices, matrices)
    residuals = np.abs(gram - np.outer(traces, traces) / n)
    np.fill_diagonal(residuals, 0.0)
    return residuals


def known_direction_residuals(matrices: np.ndarray, known_mask: mask_t, basis: OperatorBasis) -> np.ndarray:
    """Return ``|Tr(M_i σ_j)|`` for all matrices ``M_i`` and known directions ``σ_j``, shape ``(k, #known)``."""
    mask = as_mask(known_mask, basis.n_params)
    known = basis.elements[mask]
    if len(known) == 0:
        return np.zeros((len(matrices), 0))
    return np.abs(np.einsum("aij,bji->ab", np.asarray(matrices, dtype=complex), known))


def check_sic(
    p: Povm,
    known_mask: mask_t = None,
    basis: Optional[OperatorBasis] = None,
    rank_one_tol: float = RANK_ONE_TOL,
    quasi_orth_tol: float = QUASI_ORTH_TOL,
) -> SicReport:
    """Rescale the POVM elements to candidate projections and report their symmetry constants.

    Each element is rescaled as ``P_i = E_i / λ_max(E_i)``; this covers ``E_i = P_i/n`` as well as other
    constant multiples of rank-one projections without knowing the scale in advance.

    Parameters
    ----------
    p : :class:`~tomodesign.measurements.Povm`
        the POVM
    known_mask : None, bool vector, or list of int, optional
        known coordinates; if non-empty, every ``P_i`` is tested for quasi-orthogonality to the masked basis
        elements
    basis : :class:`~tomodesign.basis.OperatorBasis`, optional
        basis the mask refers to, the Gell-Mann basis of matching dimension if ``None``
    rank_one_tol : float, optional
        ``P_i`` counts as rank one if its second largest eigenvalue is at most ``rank_one_tol`` times its largest
    quasi_orth_tol : float, optional
        maximal admissible ``|Tr P_i σ_j|`` for known directions

    Returns
    -------
    :class:`~tomodesign.measurements.SicReport`
        the report

    Raises
    ------
    :exc:`~tomodesign.utils.exceptions.DegenerateElementError`
        if an element is zero

    """
    basis = basis if basis is not None else get_basis(p.dim)
    if basis.dim != p.dim:
        raise InvalidDimensionError(f"Basis dimension {basis.dim} does not match POVM dimension {p.dim}.")
    projections = []
    rank_one = True
    for i, element in enumerate(p.elements):
        ev = scipy.linalg.eigvalsh((element + element.conj().T) / 2)
        lmax = ev[-1]
        if lmax <= _ZERO_ELEMENT_TOL:
            raise DegenerateElementError(f"POVM element {i} is zero.")
        rank_one = rank_one and bool(ev[-2] <= rank_one_tol * lmax)
        projections.append(element / lmax)
    projections = np.array(projections)
    n = p.dim

    total = projections.sum(axis=0)
    lam = float(np.trace(total).real / n)
    lam_residual = float(np.max(np.abs(total - lam * np.eye(n))))

    gram = np.einsum("aij,bji->ab", projections, projections).real
    off_diag = gram[~np.eye(len(gram), dtype=bool)]
    mu = float(off_diag.mean()) if off_diag.size else 0.0
    mu_residual = float(np.max(np.abs(off_diag - mu))) if off_diag.size else 0.0

    known_res = known_direction_residuals(projections, known_mask, basis)
    max_known = float(known_res.max()) if known_res.size else 0.0
    return SicReport(
        k=p.k,
        lambda_=lam,
        mu=mu,
        max_lambda_residual=lam_residual,
        max_mu_residual=mu_residual,
        all_rank_one=rank_one,
        quasi_orthogonal_to_known=max_known <= quasi_orth_tol,
        max_known_residual=max_known,
    )
