"""Orthonormal bases of traceless Hermitian matrices."""
from functools import lru_cache, reduce
from itertools import combinations, product
from typing import Any, Dict, Iterator, Literal, Optional, Sequence, Tuple

import numpy as np

from tomodesign.utils._datatype_validation_helper import _assert_dimension
from tomodesign.utils._io import matrix_to_json
from tomodesign.utils._tolerances import ORTHONORMAL_TOL
from tomodesign.utils.exceptions import InvalidBasisError, InvalidDimensionError

BASIS_ORDERS = ("gell-mann", "pauli-product")

_PAULIS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class OperatorBasis:
    """Orthonormal basis ``{σ_j}`` of the traceless Hermitian ``n x n`` matrices.

    The basis is the coordinate frame of all Bloch vectors: a state is ``ρ = I/n + Σ θ_j σ_j`` with
    ``θ_j = Tr(ρ σ_j)``. Instances are immutable.

    Parameters
    ----------
    elements : array_like
        array of shape ``(n² - 1, n, n)`` holding the basis matrices
    order : str
        tag describing the construction (and therefore the coordinate ordering), e.g. ``"gell-mann"``
    labels : list of str, optional
        human-readable label per element
    tol : float, optional
        tolerance of the Hermiticity, trace and orthonormality checks

    Raises
    ------
    :exc:`~tomodesign.utils.exceptions.InvalidDimensionError`
        if the array does not hold ``n² - 1`` square ``n x n`` matrices
    :exc:`~tomodesign.utils.exceptions.InvalidBasisError`
        if the matrices are not Hermitian, traceless and orthonormal

    """

    def __init__(
        self,
        elements: np.ndarray,
        order: str,
        labels: Optional[Sequence[str]] = None,
        tol: float = ORTHONORMAL_TOL,
    ):
        elements = np.array(elements, dtype=complex)
        if elements.ndim != 3 or elements.shape[1] != elements.shape[2]:
            raise InvalidDimensionError(f"Expected an array of shape (n²-1, n, n), got {elements.shape}.")
        dim = elements.shape[1]
        if elements.shape[0] != dim**2 - 1:
            raise InvalidDimensionError(f"A basis of dimension {dim} needs {dim**2 - 1} elements, got {len(elements)}.")
        elements.setflags(write=False)
        self._elements = elements
        self._dim = dim
        self._order = order
        self._labels = tuple(labels) if labels is not None else tuple(f"s{j}" for j in range(len(elements)))
        herm, trace, ortho = self.residuals()
        if max(herm, trace, ortho) > tol:
            raise InvalidBasisError(
                f"Basis is not orthonormal traceless Hermitian: residuals hermitian={herm:.2e}, "
                f"trace={trace:.2e}, orthonormality={ortho:.2e}."
            )

    @property
    def dim(self) -> int:
        """Hilbert space dimension ``n``."""
        return self._dim

    @property
    def elements(self) -> np.ndarray:
        """Read-only array of shape ``(n² - 1, n, n)``."""
        return self._elements

    @property
    def order(self) -> str:
        """Ordering tag written next to serialized Bloch vectors."""
        return self._order

    @property
    def labels(self) -> Tuple[str, ...]:
        return self._labels

    @property
    def n_params(self) -> int:
        """Number of real coordinates, ``n² - 1``."""
        return len(self._elements)

    def __len__(self) -> int:
        return len(self._elements)

    def __getitem__(self, index: int) -> np.ndarray:
        return self._elements[index]

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self._elements)

    def __repr__(self) -> str:
        return f"OperatorBasis(dim={self._dim}, order={self._order!r})"

    def residuals(self) -> Tuple[float, float, float]:
        """Return the maximal Hermiticity, trace and orthonormality residuals of the elements."""
        el = self._elements
        herm = float(np.max(np.abs(el - np.conj(np.swapaxes(el, 1, 2)))))
        trace = float(np.max(np.abs(np.trace(el, axis1=1, axis2=2))))
        gram = np.einsum("aij,bji->ab", el, el)
        ortho = float(np.max(np.abs(gram - np.eye(len(el)))))
        return herm, trace, ortho

    def coefficients(self, matrix: np.ndarray) -> np.ndarray:
        """Return the real coefficients ``Re Tr(A σ_j)`` of a matrix (or a stack of matrices)."""
        matrix = np.asarray(matrix, dtype=complex)
        return np.einsum("...ij,kji->...k", matrix, self._elements).real

    def expand(self, coefficients: np.ndarray) -> np.ndarray:
        """Return ``Σ c_j σ_j`` for a coefficient vector (or a stack of vectors)."""
        coefficients = np.asarray(coefficients, dtype=float)
        return np.einsum("...k,kij->...ij", coefficients, self._elements)

    def index(self, label: str) -> int:
        """Return the coordinate index of an element label."""
        try:
            return self._labels.index(label)
        except ValueError as e:
            raise InvalidBasisError(f"Unknown basis label {label!r} for order {self._order!r}.") from e

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dim": self._dim,
            "basis_order": self._order,
            "labels": list(self._labels),
            "elements": [matrix_to_json(e) for e in self._elements],
        }


def build_basis(n: int) -> OperatorBasis:
    """Build the generalized Gell-Mann basis normalized to ``Tr σ_i σ_j = δ_ij``.

    The ordering is fixed: all symmetric pairs ``(j, k)``, ``j < k`` in row-major order, then the antisymmetric
    pairs in the same order, then the ``n - 1`` diagonal matrices. For ``n = 2`` this is ``(X, Y, Z) / √2``.

    Parameters
    ----------
    n : int
        Hilbert space dimension, ``n >= 2``

    Returns
    -------
    :class:`~tomodesign.basis.OperatorBasis`
        the basis with order tag ``"gell-mann"``

    Raises
    ------
    :exc:`~tomodesign.utils.exceptions.InvalidDimensionError`
        if ``n < 2``

    """
    _assert_dimension(n)
    return _build_gell_mann(int(n))


@lru_cache(maxsize=None)
def _build_gell_mann(n: int) -> OperatorBasis:
    pairs = list(combinations(range(n), 2))
    symmetric, antisymmetric, diagonal, labels = [], [], [], []
    for j, k in pairs:
        s = np.zeros((n, n), dtype=complex)
        s[j, k] = s[k, j] = 1 / np.sqrt(2)
        symmetric.append(s)
        a = np.zeros((n, n), dtype=complex)
        a[j, k] = -1j / np.sqrt(2)
        a[k, j] = 1j / np.sqrt(2)
        antisymmetric.append(a)
    labels += [f"S{j}{k}" for j, k in pairs]
    labels += [f"A{j}{k}" for j, k in pairs]
    for l in range(1, n):  # noqa: E741
        d = np.diag([1.0] * l + [-float(l)] + [0.0] * (n - l - 1)).astype(complex)
        diagonal.append(d / np.sqrt(l * (l + 1)))
        labels.append(f"D{l}")
    return OperatorBasis(np.array(symmetric + antisymmetric + diagonal), order="gell-mann", labels=labels)


def pauli_product_basis(n_qubits: int) -> OperatorBasis:
    """Build the normalized Pauli-product basis ``σ_{i1} ⊗ ... ⊗ σ_{iq} / 2^{q/2}`` of ``q`` qubits.

    Elements are ordered by the number of non-identity factors (so single-qubit marginal directions come first)
    and lexicographically over ``(I, X, Y, Z)`` within each weight. Labels are the Pauli strings, e.g. ``"IX"``.

    Parameters
    ----------
    n_qubits : int
        number of qubits ``q >= 1``

    Returns
    -------
    :class:`~tomodesign.basis.OperatorBasis`
        the basis with order tag ``"pauli-product"`` and dimension ``2^q``

    """
    if isinstance(n_qubits, bool) or not isinstance(n_qubits, (int, np.integer)) or n_qubits < 1:
        raise InvalidDimensionError(f"Number of qubits must be a positive integer, got {n_qubits!r}.")
    return _build_pauli_product(int(n_qubits))


@lru_cache(maxsize=None)
def _build_pauli_product(n_qubits: int) -> OperatorBasis:
    strings = ["".join(s) for s in product("IXYZ", repeat=n_qubits)][1:]
    strings.sort(key=lambda s: (sum(c != "I" for c in s), ["IXYZ".index(c) for c in s]))
    scale = 2 ** (n_qubits / 2)
    elements = [reduce(np.kron, [_PAULIS[c] for c in s]) / scale for s in strings]
    return OperatorBasis(np.array(elements), order="pauli-product", labels=strings)


def get_basis(dim: int, order: Literal["gell-mann", "pauli-product"] = "gell-mann") -> OperatorBasis:
    """Return the (cached) basis of the given dimension and ordering tag.

    Raises
    ------
    :exc:`~tomodesign.utils.exceptions.InvalidBasisError`
        if ``order`` is unknown
    :exc:`~tomodesign.utils.exceptions.InvalidDimensionError`
        if ``order`` is ``"pauli-product"`` and ``dim`` is not a power of two

    """
    if order == "gell-mann":
        return build_basis(dim)
    if order == "pauli-product":
        _assert_dimension(dim)
        n_qubits = int(dim).bit_length() - 1
        if 2**n_qubits != dim:
            raise InvalidDimensionError(f"The Pauli-product basis needs a power-of-two dimension, got {dim}.")
        return pauli_product_basis(n_qubits)
    raise InvalidBasisError(f"Unknown basis order {order!r}. Must be one of {BASIS_ORDERS}.")


def as_mask(mask, n_params: int) -> np.ndarray:
    """Normalize a coordinate mask to a boolean vector of length ``n_params``.

    Parameters
    ----------
    mask : None, bool vector, or sequence of int
        ``None`` (nothing known), a boolean vector marking the known coordinates, or a list of coordinate indices
    n_params : int
        number of coordinates

    Returns
    -------
    :class:`~numpy.ndarray`
        boolean vector, ``True`` for known coordinates

    """
    if mask is None:
        return np.zeros(n_params, dtype=bool)
    arr = np.asarray(mask)
    if arr.dtype == bool:
        if arr.shape != (n_params,):
            raise InvalidDimensionError(f"Boolean mask must have length {n_params}, got shape {arr.shape}.")
        return arr.copy()
    if arr.size == 0:
        return np.zeros(n_params, dtype=bool)
    if not np.issubdtype(arr.dtype, np.integer) or arr.ndim != 1:
        raise InvalidDimensionError("Mask must be None, a boolean vector or a list of coordinate indices.")
    if np.any(arr < 0) or np.any(arr >= n_params):
        raise InvalidDimensionError(f"Mask indices must lie in [0, {n_params}), got {arr.tolist()}.")
    out = np.zeros(n_params, dtype=bool)
    out[arr] = True
    return out


def diagonal_mask(basis: OperatorBasis) -> np.ndarray:
    """Mask the coordinates of all diagonal basis elements (the diagonal subalgebra)."""
    el = basis.elements
    off_diag = el - np.einsum("kii->ki", el)[:, :, np.newaxis] * np.eye(basis.dim)
    return np.max(np.abs(off_diag), axis=(1, 2)) <= ORTHONORMAL_TOL


def marginal_mask(basis: OperatorBasis) -> np.ndarray:
    """Mask all single-qubit marginal directions of a Pauli-product basis."""
    if basis.order != "pauli-product":
        raise InvalidBasisError("Marginal masks are only defined for the 'pauli-product' basis order.")
    return np.array([sum(c != "I" for c in label) == 1 for label in basis.labels])

