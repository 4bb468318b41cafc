"""Helper functions for click."""
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import click
import numpy as np

from tomodesign.utils.utils import assert_file_ending

MASK_SHORTHANDS = ("none", "diagonal", "marginals")
PRIOR_SHORTHANDS = ("pure", "mixed")


def validate_json_path(ctx, param, value) -> Optional[str]:  # noqa: ARG001
    """Validate that the parameter points to an existing ``*.json`` file.

    Parameters
    ----------
    ctx : :class:`click.Context`
        the context object
    param : :class:`click.Parameter`
        the parameter object
    value : str
        the value of the parameter

    Returns
    -------
    str
        the validated value of the parameter

    """
    if value:
        try:
            assert_file_ending(Path(value), ".json")
        except ValueError as e:
            raise click.BadParameter(str(e)) from e
    return value


def validate_float_list(ctx, param, value) -> Optional[List[float]]:  # noqa: ARG001
    """Parse a comma-separated list of numbers, e.g. ``"0.5, 0, 0"``."""
    if value is None or value == "":
        return None
    try:
        return [float(v) for v in value.replace(" ", "").split(",") if v != ""]
    except ValueError as e:
        raise click.BadParameter(f"Expected comma-separated numbers, got {value!r}.") from e


def validate_mask(ctx, param, value) -> Union[str, List[int]]:  # noqa: ARG001
    """Parse ``--mask``: comma-separated coordinate indices or one of ``none``, ``diagonal``, ``marginals``.

    Shorthands are returned as strings and resolved against the basis by :func:`resolve_mask`.
    """
    if value is None:
        return "none"
    value = value.replace(" ", "").lower()
    if value in MASK_SHORTHANDS:
        return value
    indices = value.split(",")
    if not all(i.isdigit() for i in indices):
        raise click.BadParameter(f"Mask must be comma-separated indices or one of {MASK_SHORTHANDS}, got {value!r}.")
    return [int(i) for i in indices]


def resolve_mask(value: Union[str, List[int]], basis) -> np.ndarray:
    """Turn a parsed ``--mask`` value into a boolean vector over the basis coordinates."""
    from tomodesign.basis import as_mask, diagonal_mask, marginal_mask

    if value == "none":
        return as_mask(None, basis.n_params)
    if value == "diagonal":
        return diagonal_mask(basis)
    if value == "marginals":
        return marginal_mask(basis)
    return as_mask(value, basis.n_params)


def validate_prior(ctx, param, value) -> Optional[Union[str, Dict[str, Any]]]:  # noqa: ARG001
    """Parse ``--prior``: a ``*.json`` file, an inline JSON object, or the shorthands ``pure`` and ``mixed``.

    The shorthands stand for the Haar orbit of a pure state and of the maximally mixed state.
    """
    if value is None:
        return None
    value = value.strip()
    if value.lower() in PRIOR_SHORTHANDS:
        return value.lower()
    if value.startswith("{"):
        try:
            data = json.loads(value)
        except json.JSONDecodeError as e:
            raise click.BadParameter(f"Invalid prior JSON at column {e.colno}: {e.msg}") from e
        if not isinstance(data, dict):
            raise click.BadParameter("Prior JSON must be an object.")
        return data
    validate_json_path(ctx, param, value)
    try:
        return json.loads(Path(value).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise click.BadParameter(f"{value}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e


def resolve_prior(value: Optional[Union[str, Dict[str, Any]]], dim: int):
    """Turn a parsed ``--prior`` value into an :class:`~tomodesign.priors.InvariantPrior` of dimension ``dim``."""
    from tomodesign.priors import make_prior, prior_from_dict

    if value is None or value == "pure":
        return make_prior("haar_orbit", spectrum=[1.0] + [0.0] * (dim - 1))
    if value == "mixed":
        return make_prior("haar_orbit", spectrum=[1.0 / dim] * dim)
    return prior_from_dict(value)
