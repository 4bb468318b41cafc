"""Module containing example measurement designs and priors that can be loaded from JSON."""

from pathlib import Path
from typing import Literal

from tomodesign.measurements import Design, Povm, VonNeumannFamily, load_design
from tomodesign.priors import InvariantPrior, prior_from_dict
from tomodesign.utils._types import path_t
from tomodesign.utils.utils import read_json

_EXAMPLE_DATA_PATH_LOCAL = Path(__file__).parent.parent.joinpath("example_data")

EXAMPLE_DESIGNS = ("tetrahedron", "trine", "qutrit7", "two_qubit_family")


def _is_installed_manually() -> bool:
    """Check whether tomodesign was installed manually and example data exists in the local path.

    Returns
    -------
    bool
        ``True`` if tomodesign was installed manually, ``False`` otherwise

    """
    return (_EXAMPLE_DATA_PATH_LOCAL / "__init__.py").is_file()


def _get_data(file_name: str) -> path_t:
    if not _is_installed_manually():
        raise FileNotFoundError(
            f"Example data folder not found at {_EXAMPLE_DATA_PATH_LOCAL}. "
            "Example data is only available when tomodesign is installed from the repository."
        )
    return _EXAMPLE_DATA_PATH_LOCAL.joinpath(file_name)


def get_example_design(name: Literal["tetrahedron", "trine", "qutrit7", "two_qubit_family"]) -> Design:
    """Get an example measurement design.

    Parameters
    ----------
    name : str
        design name. Must be one of ``tetrahedron``, ``trine``, ``qutrit7``, or ``two_qubit_family``.

    Returns
    -------
    :class:`~tomodesign.measurements.Povm` or :class:`~tomodesign.measurements.VonNeumannFamily`
        the design

    """
    if name not in EXAMPLE_DESIGNS:
        raise ValueError(f"Unknown example design {name!r}. Expected one of {EXAMPLE_DESIGNS}.")
    return load_design(_get_data(f"{name}.json"))


def get_tetrahedron() -> Povm:
    """Get the qubit SIC-POVM with one element along ``+z``."""
    return get_example_design("tetrahedron")


def get_trine() -> Povm:
    """Get the trine POVM in the equatorial plane of the Bloch sphere."""
    return get_example_design("trine")


def get_qutrit7() -> Povm:
    """Get the seven-element qutrit POVM, stored as an exponent table of the seventh root of unity."""
    return get_example_design("qutrit7")


def get_two_qubit_family() -> VonNeumannFamily:
    return get_example_design("two_qubit_family")


def get_pure_qubit_prior() -> InvariantPrior:
    """Get the unitarily invariant prior over pure qubit states."""
    return prior_from_dict(read_json(_get_data("pure_prior.json")))
