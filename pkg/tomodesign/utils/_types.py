"""Some custom helper types to make type hints and type checking easier."""

from pathlib import Path
from typing import Sequence, TypeVar, Union

import numpy as np

path_t = TypeVar("path_t", str, Path)  # pylint:disable=invalid-name
arr_t = Union[np.ndarray, Sequence[float]]  # pylint:disable=invalid-name
mask_t = Union[None, np.ndarray, Sequence[bool], Sequence[int]]  # pylint:disable=invalid-name
