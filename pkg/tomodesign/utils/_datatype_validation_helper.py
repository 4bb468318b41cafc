"""Internal helpers for data validation."""
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from tomodesign.utils._tolerances import HERMITIAN_TOL, PROBABILITY_TOL, TRACE_TOL
from tomodesign.utils._types import path_t
from tomodesign.utils.exceptions import (
    FileExtensionError,
    InvalidBasisError,
    InvalidDimensionError,
    InvalidProbabilityError,
    InvalidStateError,
)


def _assert_file_extension(
    file_name: path_t, expected_extension: Union[str, Sequence[str]], raise_exception: Optional[bool] = True
) -> Optional[bool]:
    """Check the suffix of a design, state, report or table file.

    Parameters
    ----------
    file_name : path or str
        file whose suffix is checked (the file does not need to exist)
    expected_extension : str or list of str
        accepted suffix(es), including the leading dot, e.g. ``".json"``
    raise_exception : bool, optional
        whether to raise an exception or return a bool value

    Returns
    -------
    ``True`` if the suffix is accepted, ``False`` otherwise (if ``raise_exception`` is ``False``)

    Raises
    ------
    :exc:`~tomodesign.utils.exceptions.FileExtensionError`
        if ``raise_exception`` is ``True`` and the suffix is not accepted

    """
    accepted = [expected_extension] if isinstance(expected_extension, str) else list(expected_extension)
    suffix = Path(file_name).suffix
    if suffix in accepted:
        return True
    if raise_exception:
        raise FileExtensionError(f"'{Path(file_name).name}' has suffix {suffix!r}, expected one of {accepted}.")
    return False


def _assert_dimension(dim, raise_exception: Optional[bool] = True) -> Optional[bool]:
    """Check that ``dim`` is an integer Hilbert space dimension of at least 2.

    Raises
    ------
    :exc:`~tomodesign.utils.exceptions.InvalidDimensionError`
        if ``raise_exception`` is ``True`` and ``dim`` is not a valid dimension

    """
    if isinstance(dim, bool) or not isinstance(dim, (int, np.integer)) or dim < 2:
        if raise_exception:
            raise InvalidDimensionError(f"Dimension is expected to be an integer n >= 2, got {dim!r}.")
        return False
    return True


def _assert_square_matrix(
    matrix: np.ndarray, dim: Optional[int] = None, raise_exception: Optional[bool] = True
) -> Optional[bool]:
    """Check that ``matrix`` is square and, optionally, has the expected dimension.

    Parameters
    ----------
    matrix : :class:`~numpy.ndarray`
        matrix to check
    dim : int, optional
        expected number of rows and columns or ``None`` to accept any square shape
    raise_exception : bool, optional
        whether to raise an exception or return a bool value

    Raises
    ------
    :exc:`~tomodesign.utils.exceptions.InvalidDimensionError`
        if ``raise_exception`` is ``True`` and the shape does not match

    """
    shape = np.shape(matrix)
    ok = len(shape) == 2 and shape[0] == shape[1] and (dim is None or shape[0] == dim)
    if not ok:
        if raise_exception:
            expected = "a square matrix" if dim is None else f"a {dim}x{dim} matrix"
            raise InvalidDimensionError(f"Expected {expected}, got shape {shape}.")
        return False
    return True


def _assert_is_hermitian(
    matrix: np.ndarray, tol: float = HERMITIAN_TOL, raise_exception: Optional[bool] = True
) -> Optional[bool]:
    """Check that ``matrix`` equals its conjugate transpose entrywise within ``tol``.

    Raises
    ------
    :exc:`~tomodesign.utils.exceptions.InvalidStateError`
        if ``raise_exception`` is ``True`` and ``matrix`` is not Hermitian

    """
    deviation = float(np.max(np.abs(matrix - matrix.conj().T))) if np.size(matrix) else 0.0
    if deviation > tol:
        if raise_exception:
            raise InvalidStateError(f"Matrix is not Hermitian (max deviation {deviation:.3e} > {tol:.1e}).")
        return False
    return True


def _assert_unit_trace(
    matrix: np.ndarray, tol: float = TRACE_TOL, raise_exception: Optional[bool] = True
) -> Optional[bool]:
    """Check that ``matrix`` has trace one within ``tol``.

    Raises
    ------
    :exc:`~tomodesign.utils.exceptions.InvalidStateError`
        if ``raise_exception`` is ``True`` and the trace differs from one

    """
    trace = np.trace(matrix)
    if abs(trace - 1) > tol:
        if raise_exception:
            raise InvalidStateError(f"Density matrix must have unit trace, got {trace:.15g}.")
        return False
    return True


def _assert_probabilities(
    p_vec: np.ndarray,
    require_sum_le_one: Optional[bool] = True,
    tol: float = PROBABILITY_TOL,
    raise_exception: Optional[bool] = True,
) -> Optional[bool]:
    """Check that every entry of ``p_vec`` is a probability (and, optionally, that they sum to at most one).

    Parameters
    ----------
    p_vec : :class:`~numpy.ndarray`
        vector of probabilities or relative frequencies
    require_sum_le_one : bool, optional
        whether the entries must describe (part of) one distribution, i.e. sum to at most one
    tol : float, optional
        numerical slack granted on both ends of the interval
    raise_exception : bool, optional
        whether to raise an exception or return a bool value

    Raises
    ------
    :exc:`~tomodesign.utils.exceptions.InvalidProbabilityError`
        if ``raise_exception`` is ``True`` and the check fails

    """
    p_vec = np.asarray(p_vec, dtype=float)
    if p_vec.size == 0:
        return True
    bad = np.any(p_vec < -tol) or np.any(p_vec > 1 + tol) or not np.all(np.isfinite(p_vec))
    if not bad and require_sum_le_one:
        bad = p_vec.sum() > 1 + tol
    if bad:
        if raise_exception:
            raise InvalidProbabilityError(f"Values are expected to be probabilities in [0, 1], got {p_vec.tolist()}.")
        return False
    return True


def _assert_basis_order(
    actual: str, expected: str, context: str = "state", raise_exception: Optional[bool] = True
) -> Optional[bool]:
    """Check that coordinates given in basis order ``actual`` may be combined with a design built in ``expected``.

    Raises
    ------
    :exc:`~tomodesign.utils.exceptions.InvalidBasisError`
        if ``raise_exception`` is ``True`` and the two orderings differ

    """
    if actual != expected:
        if raise_exception:
            raise InvalidBasisError(
                f"The {context} uses basis order {actual!r} but the design was built in basis order {expected!r}."
            )
        return False
    return True
