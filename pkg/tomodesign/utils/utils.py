"""Utility functions for the tomodesign package."""
import json
import warnings
from pathlib import Path
from typing import Any, Dict, Literal, Sequence, Type, Union

from tomodesign.utils.exceptions import DesignParseError

ERROR_HANDLING = ("ignore", "warn", "raise")


def write_to_file(file: Path, content: str):
    """Write ``content`` as UTF-8 text to ``file``, replacing anything that was there before.

    Missing parent folders are created, so reports can be written to fresh output locations.
    """
    file = Path(file)
    file.parent.mkdir(parents=True, exist_ok=True)
    file.write_text(content, encoding="utf-8")


def assert_file_ending(path: Path, ending: Union[str, Sequence[str]]) -> bool:
    """Check that ``path`` is an existing file whose suffix is one of ``ending``.

    Raises
    ------
    ValueError
        if the file does not exist or has another suffix

    """
    path = Path(path)
    endings = [ending] if isinstance(ending, str) else list(ending)
    if not path.is_file():
        raise ValueError(f"No input file at '{path}'.")
    if path.suffix not in endings:
        raise ValueError(f"Input file '{path.name}' must have one of the suffixes {endings}.")
    return True


def read_json(path: Path) -> Dict[str, Any]:
    """Read a JSON document and report syntax errors with their position.

    Parameters
    ----------
    path : :class:`~pathlib.Path`
        path to the ``*.json`` file

    Returns
    -------
    dict
        the parsed document

    Raises
    ------
    :exc:`~tomodesign.utils.exceptions.DesignParseError`
        if the file is not valid JSON or its top level is not an object

    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise DesignParseError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    if not isinstance(data, dict):
        raise DesignParseError(f"{path}: top level must be a JSON object, got {type(data).__name__}")
    return data


def to_json_string(data: Dict[str, Any]) -> str:
    """Serialize a report dictionary with stable formatting."""
    return json.dumps(data, indent=2, sort_keys=False) + "\n"


def handle_issue(
    message: str,
    exception_type: Type[Exception],
    error_handling: Literal["ignore", "warn", "raise"] = "warn",
):
    """Report a recoverable data problem according to ``error_handling``.

    Parameters
    ----------
    message : str
        description of the problem
    exception_type : type
        exception class raised for ``error_handling="raise"``
    error_handling : one of {"ignore", "warn", "raise"}, optional
        whether to ignore the problem, emit a :class:`UserWarning`, or raise ``exception_type``

    """
    if error_handling not in ERROR_HANDLING:
        raise ValueError(f"'error_handling' must be one of {ERROR_HANDLING}, got {error_handling!r}.")
    if error_handling == "raise":
        raise exception_type(message)
    if error_handling == "warn":
        warnings.warn(message)
