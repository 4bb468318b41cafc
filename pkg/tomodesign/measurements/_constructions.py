"""Constructions of the designs used as reference optima."""
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from tomodesign.measurements._povm import Povm, VonNeumannFamily
from tomodesign.utils._datatype_validation_helper import _assert_dimension, _assert_is_hermitian, _assert_square_matrix
from tomodesign.utils.exceptions import InvalidDimensionError

_PAULIS = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

# (i, j) Pauli index pairs of the two-qubit family, in the order σ11, σ22, σ33, σ12, σ23, σ31, σ13, σ21, σ32
TWO_QUBIT_PAIRS = ((1, 1), (2, 2), (3, 3), (1, 2), (2, 3), (3, 1), (1, 3), (2, 1), (3, 2))

# exponents of ε = exp(2πi/7) of the seven-element qutrit POVM; every element is ε^table / 7
QUTRIT_EXPONENTS = (
    ((0, 0, 0), (0, 0, 0), (0, 0, 0)),
    ((0, 6, 2), (1, 0, 3), (5, 4, 0)),
    ((0, 2, 3), (5, 0, 1), (4, 6, 0)),
    ((0, 4, 6), (3, 0, 2), (1, 5, 0)),
    ((0, 1, 5), (6, 0, 4), (2, 3, 0)),
    ((0, 5, 4), (2, 0, 6), (3, 1, 0)),
    ((0, 3, 1), (4, 0, 5), (6, 2, 0)),
)


def qubit_projection(bloch_vector: Sequence[float]) -> np.ndarray:
    """Return ``(I + n·σ)/2`` for a Pauli-normalized Bloch vector ``n``."""
    x, y, z = bloch_vector
    return (_PAULIS[0] + x * _PAULIS[1] + y * _PAULIS[2] + z * _PAULIS[3]) / 2


def tetrahedron_povm() -> Povm:
    """Return the qubit SIC-POVM ``{P_i / 2}`` with one projector along ``+z``.

    The remaining three projectors point to ``z = -1/3`` with azimuthal phases ``0``, ``2π/3`` and ``-2π/3``.
    """
    projections = [qubit_projection((0.0, 0.0, 1.0))]
    for phase in (0.0, 2 * np.pi / 3, -2 * np.pi / 3):
        off = np.sqrt(2) * np.exp(1j * phase) / 3
        projections.append(np.array([[1 / 3, off], [np.conj(off), 2 / 3]]))
    return Povm(np.array(projections) / 2)


def trine_povm() -> Povm:
    """Return the trine POVM ``{(2/3) P_i}`` with ``P_i`` in the ``σ1σ2`` plane at 120 degrees."""
    elements = []
    for j in range(3):
        phi = 2 * np.pi * j / 3
        elements.append(2 / 3 * qubit_projection((np.cos(phi), np.sin(phi), 0.0)))
    return Povm(elements)


def povm_from_exponents(exponents, root: int = 7, scale: Optional[float] = None) -> Povm:
    """Build ``{scale · ε^T}`` with ``ε = exp(2πi/root)`` for integer exponent tables ``T``.

    Parameters
    ----------
    exponents : array_like
        integer array of shape ``(k, n, n)``
    root : int, optional
        order of the root of unity
    scale : float, optional
        common prefactor, ``1/k`` if ``None``

    """
    exponents = np.asarray(exponents, dtype=int)
    scale = 1 / len(exponents) if scale is None else scale
    eps = np.exp(2j * np.pi / root)
    return Povm(scale * eps ** (exponents % root))


def qutrit_conditional_sic() -> Povm:
    """Return the seven-element qutrit POVM that is symmetric and quasi-orthogonal to the diagonal subalgebra.

    Elements 5 to 7 are the complex conjugates of elements 2 to 4.
    """
    return povm_from_exponents(QUTRIT_EXPONENTS, root=7)


def two_qubit_optimal_family() -> VonNeumannFamily:
    """Return the nine effects ``(I + σ_i ⊗ σ_j)/2`` for the correlation directions of two qubits."""
    eye = np.eye(4, dtype=complex)
    return VonNeumannFamily([(eye + np.kron(_PAULIS[i], _PAULIS[j])) / 2 for i, j in TWO_QUBIT_PAIRS])


def computational_basis(n: int) -> np.ndarray:
    """Return the standard basis of ``C^n`` as columns."""
    _assert_dimension(n)
    return np.eye(n, dtype=complex)


def fourier_basis(n: int) -> np.ndarray:
    """Return the Fourier basis ``ω^{jk}/√n`` of ``C^n`` as columns."""
    _assert_dimension(n)
    j, k = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return np.exp(2j * np.pi * j * k / n) / np.sqrt(n)


def eigenbasis(matrix: np.ndarray) -> np.ndarray:
    """Return the eigenvectors (as columns, ascending eigenvalues) of a Hermitian matrix."""
    matrix = np.asarray(matrix, dtype=complex)
    _assert_square_matrix(matrix)
    if matrix.shape[0] < 2:
        raise InvalidDimensionError("Eigenbases need a dimension of at least 2.")
    _assert_is_hermitian(matrix)
    return scipy.linalg.eigh(matrix)[1]


def projective_povm(vectors: np.ndarray) -> Povm:
    """Return the rank-one projective POVM ``{|v_i><v_i|}`` of an orthonormal basis given as columns."""
    vectors = np.asarray(vectors, dtype=complex)
    return Povm(np.einsum("ik,jk->kij", vectors, vectors.conj()))
