"""POVMs, von Neumann measurement families, their validation and outcome probabilities."""
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Optional, Sequence, Union

import numpy as np
import scipy.linalg

from tomodesign.basis import BlochState, OperatorBasis, bloch_to_density
from tomodesign.utils._io import matrix_to_json
from tomodesign.utils._tolerances import COMPLETENESS_TOL, HERMITIAN_TOL, POSITIVITY_TOL
from tomodesign.utils.exceptions import InvalidDimensionError


def _as_matrix_stack(matrices, name: str) -> np.ndarray:
    arr = np.array(matrices, dtype=complex)
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2] or arr.shape[0] == 0:
        raise InvalidDimensionError(f"{name} must be a non-empty sequence of square matrices, got shape {arr.shape}.")
    if arr.shape[1] < 2:
        raise InvalidDimensionError(f"{name} must act on a space of dimension >= 2, got {arr.shape[1]}.")
    arr.setflags(write=False)
    return arr


class _MatrixFamily:
    _name = "matrices"

    def __init__(self, matrices: Union[np.ndarray, Sequence[np.ndarray]]):
        self._matrices = _as_matrix_stack(matrices, self._name)

    @property
    def dim(self) -> int:
        """Hilbert space dimension ``n``."""
        return self._matrices.shape[1]

    def __len__(self) -> int:
        return len(self._matrices)

    def __getitem__(self, index: int) -> np.ndarray:
        return self._matrices[index]

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self._matrices)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim={self.dim}, size={len(self)})"


class Povm(_MatrixFamily):
    """A ``k``-outcome POVM ``{E_1, ..., E_k}`` on an ``n``-level system.

    Construction only checks shapes; use :func:`validate_povm` to check positivity and completeness.
    By convention the first ``k - 1`` outcomes are the estimating outcomes of a linear estimator and the last
    element is the discarded completion element.

    Parameters
    ----------
    elements : array_like
        sequence of ``k`` complex ``n x n`` matrices

    """

    _name = "POVM elements"

    @property
    def elements(self) -> np.ndarray:
        """Read-only array of shape ``(k, n, n)``."""
        return self._matrices

    @property
    def k(self) -> int:
        """Number of outcomes."""
        return len(self._matrices)

    def to_dict(self) -> Dict[str, Any]:
        return {"dim": self.dim, "elements": [matrix_to_json(e) for e in self._matrices]}


class VonNeumannFamily(_MatrixFamily):
    """A family of two-outcome measurements ``{E^i, I - E^i}``, each performed on its own copies of the state.

    Parameters
    ----------
    effects : array_like
        sequence of complex ``n x n`` positive contractions ``E^i``

    """

    _name = "effects"

    @property
    def effects(self) -> np.ndarray:
        """Read-only array of shape ``(d, n, n)``."""
        return self._matrices

    @property
    def k(self) -> int:
        """Number of effects."""
        return len(self._matrices)

    def as_povms(self) -> List[Povm]:
        """Return every member as its two-element POVM ``{E, I - E}``."""
        eye = np.eye(self.dim)
        return [Povm([e, eye - e]) for e in self._matrices]

    def to_dict(self) -> Dict[str, Any]:
        return {"dim": self.dim, "effects": [matrix_to_json(e) for e in self._matrices]}


@dataclass(frozen=True)
class Violation:
    """A violated invariant of a measurement design.

    Attributes
    ----------
    invariant : str
        one of ``"hermiticity"``, ``"positivity"``, ``"contraction"``, ``"completeness"``
    element : int or None
        index of the offending element, ``None`` for properties of the whole design
    magnitude : float
        size of the violation (e.g. the negative part of the smallest eigenvalue)

    """

    invariant: str
    element: Optional[int]
    magnitude: float

    def to_dict(self) -> Dict[str, Any]:
        return {"invariant": self.invariant, "element": self.element, "magnitude": self.magnitude}


def _hermiticity_violations(matrices: np.ndarray, tol: float) -> List[Violation]:
    out = []
    for i, m in enumerate(matrices):
        if not scipy.linalg.ishermitian(m, atol=tol):
            out.append(Violation("hermiticity", i, float(np.max(np.abs(m - m.conj().T)))))
    return out


def _eigenvalues(matrices: np.ndarray) -> np.ndarray:
    herm = (matrices + np.conj(np.swapaxes(matrices, 1, 2))) / 2
    return np.linalg.eigvalsh(herm)


def validate_povm(
    p: Povm,
    positivity_tol: float = POSITIVITY_TOL,
    completeness_tol: float = COMPLETENESS_TOL,
    hermitian_tol: float = HERMITIAN_TOL,
) -> List[Violation]:
    """Check that all POVM elements are positive and that they sum to the identity.

    Parameters
    ----------
    p : :class:`~tomodesign.measurements.Povm`
        the POVM
    positivity_tol : float, optional
        smallest admissible eigenvalue is ``-positivity_tol``
    completeness_tol : float, optional
        maximal entrywise deviation of ``Σ E_i`` from the identity
    hermitian_tol : float, optional
        maximal entrywise deviation of ``E_i`` from ``E_i*``

    Returns
    -------
    list of :class:`~tomodesign.measurements.Violation`
        empty if and only if the POVM is valid

    """
    elements = p.elements
    violations = _hermiticity_violations(elements, hermitian_tol)
    min_ev = _eigenvalues(elements)[:, 0]
    violations += [Violation("positivity", i, float(-ev)) for i, ev in enumerate(min_ev) if ev < -positivity_tol]
    deviation = float(np.max(np.abs(elements.sum(axis=0) - np.eye(p.dim))))
    if deviation > completeness_tol:
        violations.append(Violation("completeness", None, deviation))
    return violations


def validate_family(
    f: VonNeumannFamily, positivity_tol: float = POSITIVITY_TOL, hermitian_tol: float = HERMITIAN_TOL
) -> List[Violation]:
    """Check that every effect of a von Neumann family is a positive contraction ``0 <= E <= I``.

    Returns
    -------
    list of :class:`~tomodesign.measurements.Violation`
        empty if and only if the family is valid

    """
    effects = f.effects
    violations = _hermiticity_violations(effects, hermitian_tol)
    ev = _eigenvalues(effects)
    for i in range(len(effects)):
        if ev[i, 0] < -positivity_tol:
            violations.append(Violation("positivity", i, float(-ev[i, 0])))
        if ev[i, -1] > 1 + positivity_tol:
            violations.append(Violation("contraction", i, float(ev[i, -1] - 1)))
    return violations


def _density(state: BlochState, dim: int, basis: Optional[OperatorBasis]) -> np.ndarray:
    if state.dim != dim:
        raise InvalidDimensionError(f"State dimension {state.dim} does not match design dimension {dim}.")
    return bloch_to_density(state, basis)


def probabilities(state: BlochState, p: Povm, basis: Optional[OperatorBasis] = None) -> np.ndarray:
    """Return the Born-rule probabilities ``p_i = Tr(ρ E_i)`` of all ``k`` outcomes.

    Parameters
    ----------
    state : :class:`~tomodesign.basis.BlochState`
        the state
    p : :class:`~tomodesign.measurements.Povm`
        the POVM
    basis : :class:`~tomodesign.basis.OperatorBasis`, optional
        basis the state refers to (resolved from the state's ordering tag if ``None``)

    Raises
    ------
    :exc:`~tomodesign.utils.exceptions.InvalidDimensionError`
        if state and POVM dimensions differ

    """
    rho = _density(state, p.dim, basis)
    return np.einsum("ij,kji->k", rho, p.elements).real


def family_probabilities(state: BlochState, f: VonNeumannFamily, basis: Optional[OperatorBasis] = None) -> np.ndarray:
    """Return ``Tr(ρ E^i)`` for every effect of a von Neumann family."""
    rho = _density(state, f.dim, basis)
    return np.einsum("ij,kji->k", rho, f.effects).real
