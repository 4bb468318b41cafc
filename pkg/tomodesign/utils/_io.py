"""JSON codecs for matrices and real vectors."""
from typing import Any, List, Optional

import numpy as np

from tomodesign.utils.exceptions import DesignParseError


def matrix_to_json(matrix: np.ndarray) -> List[List[List[float]]]:
    """Encode a complex matrix as row-major nested lists of ``[re, im]`` pairs."""
    matrix = np.asarray(matrix, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in matrix]


def matrix_from_json(data: Any, field: str = "matrix", dim: Optional[int] = None) -> np.ndarray:
    """Decode a matrix written by :func:`matrix_to_json`.

    Plain real entries are accepted in place of ``[re, im]`` pairs.

    Parameters
    ----------
    data : list
        nested lists as found in the JSON document
    field : str, optional
        path of the field inside the document, used in error messages
    dim : int, optional
        expected number of rows and columns

    Returns
    -------
    :class:`~numpy.ndarray`
        complex matrix

    Raises
    ------
    :exc:`~tomodesign.utils.exceptions.DesignParseError`
        if the entry is not a (square, ``dim`` x ``dim``) matrix of numbers

    """
    if not isinstance(data, list) or not data or not all(isinstance(row, list) for row in data):
        raise DesignParseError(f"{field}: expected a non-empty list of rows")
    n_rows = len(data)
    if any(len(row) != n_rows for row in data):
        raise DesignParseError(f"{field}: expected a square matrix, got rows of lengths {[len(r) for r in data]}")
    if dim is not None and n_rows != dim:
        raise DesignParseError(f"{field}: expected a {dim}x{dim} matrix, got {n_rows}x{n_rows}")
    out = np.empty((n_rows, n_rows), dtype=complex)
    for i, row in enumerate(data):
        for j, entry in enumerate(row):
            out[i, j] = _entry_from_json(entry, f"{field}[{i}][{j}]")
    return out


def _entry_from_json(entry: Any, field: str) -> complex:
    if isinstance(entry, bool):
        raise DesignParseError(f"{field}: expected a number or [re, im] pair, got {entry!r}")
    if isinstance(entry, (int, float)):
        return complex(entry)
    if isinstance(entry, list) and len(entry) == 2 and all(_is_number(x) for x in entry):
        return complex(entry[0], entry[1])
    raise DesignParseError(f"{field}: expected a number or [re, im] pair, got {entry!r}")


def _is_number(x: Any) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def vector_from_json(data: Any, field: str = "vector", length: Optional[int] = None) -> np.ndarray:
    """Decode a flat list of real numbers, optionally checking its length."""
    if not isinstance(data, list) or not all(_is_number(x) for x in data):
        raise DesignParseError(f"{field}: expected a flat list of real numbers")
    if length is not None and len(data) != length:
        raise DesignParseError(f"{field}: expected {length} entries, got {len(data)}")
    return np.asarray(data, dtype=float)
