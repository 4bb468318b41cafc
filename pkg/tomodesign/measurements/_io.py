"""Reading and writing measurement designs as JSON."""
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np

from tomodesign.measurements._constructions import povm_from_exponents
from tomodesign.measurements._povm import Povm, VonNeumannFamily
from tomodesign.utils._datatype_validation_helper import _assert_file_extension
from tomodesign.utils._io import matrix_from_json
from tomodesign.utils._types import path_t
from tomodesign.utils.exceptions import DesignParseError
from tomodesign.utils.utils import read_json, to_json_string, write_to_file

Design = Union[Povm, VonNeumannFamily]


def _read_dim(data: Dict[str, Any]) -> int:
    dim = data.get("dim")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 2:
        raise DesignParseError(f"dim: expected an integer >= 2, got {dim!r}")
    return dim


def _read_matrices(data: Dict[str, Any], key: str, dim: int) -> np.ndarray:
    entries = data[key]
    if not isinstance(entries, list) or not entries:
        raise DesignParseError(f"{key}: expected a non-empty list of matrices")
    return np.array([matrix_from_json(m, field=f"{key}[{i}]", dim=dim) for i, m in enumerate(entries)])


def povm_from_dict(data: Dict[str, Any]) -> Povm:
    """Create a POVM from ``{"dim": n, "elements": [...]}``.

    An exponent-table form ``{"dim": n, "root_of_unity": r, "exponents": [...]}`` (elements ``ε^T / k``) is
    accepted as well.

    Raises
    ------
    :exc:`~tomodesign.utils.exceptions.DesignParseError`
        naming the offending field if the document is malformed

    """
    dim = _read_dim(data)
    if "elements" in data:
        return Povm(_read_matrices(data, "elements", dim))
    if "exponents" in data:
        tables = data["exponents"]
        root = data.get("root_of_unity", 7)
        if not isinstance(root, int) or isinstance(root, bool) or root < 1:
            raise DesignParseError(f"root_of_unity: expected a positive integer, got {root!r}")
        try:
            arr = np.array(tables, dtype=int)
        except (TypeError, ValueError) as e:
            raise DesignParseError("exponents: expected a list of integer tables") from e
        if arr.ndim != 3 or arr.shape[1:] != (dim, dim):
            raise DesignParseError(f"exponents: expected tables of shape {dim}x{dim}, got {arr.shape[1:]}")
        return povm_from_exponents(arr, root=root)
    raise DesignParseError("POVM document needs an 'elements' (or 'exponents') field")


def family_from_dict(data: Dict[str, Any]) -> VonNeumannFamily:
    """Create a von Neumann family from ``{"dim": n, "effects": [...]}``."""
    dim = _read_dim(data)
    if "effects" not in data:
        raise DesignParseError("Family document needs an 'effects' field")
    return VonNeumannFamily(_read_matrices(data, "effects", dim))


def design_from_dict(data: Dict[str, Any]) -> Design:
    """Create a POVM or a von Neumann family depending on the fields present.

    Reports that embed a design under a ``"design"`` key (e.g. optimization results) are unwrapped.
    """
    if isinstance(data.get("design"), dict):
        return design_from_dict(data["design"])
    if "effects" in data:
        return family_from_dict(data)
    return povm_from_dict(data)


def load_design(path: path_t) -> Design:
    """Load a POVM or von Neumann family from a ``*.json`` file.

    Raises
    ------
    :exc:`~tomodesign.utils.exceptions.FileExtensionError`
        if the file is not a ``*.json`` file
    :exc:`~tomodesign.utils.exceptions.DesignParseError`
        if the document is malformed

    """
    _assert_file_extension(path, ".json")
    data = read_json(Path(path))
    return design_from_dict(data)


def povm_from_json(path: path_t) -> Povm:
    design = load_design(path)
    if not isinstance(design, Povm):
        raise DesignParseError(f"{path}: expected a POVM document, found a von Neumann family")
    return design


def family_from_json(path: path_t) -> VonNeumannFamily:
    design = load_design(path)
    if not isinstance(design, VonNeumannFamily):
        raise DesignParseError(f"{path}: expected a von Neumann family document, found a POVM")
    return design


def design_to_json(design: Design, path: path_t):
    """Write a POVM or von Neumann family to a ``*.json`` file."""
    _assert_file_extension(path, ".json")
    write_to_file(Path(path), to_json_string(design.to_dict()))


povm_to_json = design_to_json
family_to_json = design_to_json
