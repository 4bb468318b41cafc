"""Unconstrained real parametrizations of POVMs and same-spectrum von Neumann families."""
from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np

from tomodesign.utils.exceptions import ValidationError

_SINGULAR_SUM_TOL = 1e-14


def spectrum_pairs(spectrum: Sequence[float]) -> List[Tuple[int, int]]:
    """Index pairs ``(j, k)``, ``j < k``, whose spectrum entries differ; only these generators move the template."""
    return [(j, k) for j in range(len(spectrum)) for k in range(j + 1, len(spectrum)) if spectrum[j] != spectrum[k]]


def _lower_triangular(x: np.ndarray, dim: int) -> np.ndarray:
    """Map ``(m, dim²)`` reals to ``m`` lower-triangular complex matrices with real diagonals."""
    m = x.shape[0]
    rows, cols = np.tril_indices(dim, -1)
    n_off = len(rows)
    out = np.zeros((m, dim, dim), dtype=complex)
    idx = np.arange(dim)
    out[:, idx, idx] = x[:, :dim]
    out[:, rows, cols] = x[:, dim : dim + n_off] + 1j * x[:, dim + n_off :]
    return out


def _inv_sqrt(matrix: np.ndarray) -> Optional[np.ndarray]:
    ev, vecs = np.linalg.eigh(matrix)
    if ev[0] <= _SINGULAR_SUM_TOL * max(ev[-1], 1.0):
        return None
    return (vecs / np.sqrt(ev)) @ vecs.conj().T


class PovmParametrization:
    """Real coordinates of a ``k``-outcome POVM on ``C^dim``.

    Every element is built from a lower-triangular factor ``L_i`` with ``dim²`` real parameters and
    ``A_i = L_i L_i*``:

    * ``"normalized"``: ``E_i = S^{-1/2} A_i S^{-1/2}`` with ``S = Σ A_i``; every parameter vector with invertible
      ``S`` is a valid POVM.
    * ``"completion"``: ``E_i = A_i`` for ``i < k`` and ``E_k = I - Σ A_i``; the last element is positive only
      inside a region, so :meth:`completion_margin` serves as a barrier.

    Parameters
    ----------
    dim : int
        Hilbert space dimension
    k : int
        number of outcomes
    mode : str, optional
        ``"normalized"`` or ``"completion"``

    """

    def __init__(self, dim: int, k: int, mode: Literal["normalized", "completion"] = "normalized"):
        if mode not in ("normalized", "completion"):
            raise ValidationError(f"Unknown parametrization {mode!r}.")
        self.dim = dim
        self.k = k
        self.mode = mode
        self._n_factors = k if mode == "normalized" else k - 1

    @property
    def n_params(self) -> int:
        return self._n_factors * self.dim**2

    def elements(self, x: np.ndarray) -> Optional[np.ndarray]:
        """Return the ``(k, dim, dim)`` POVM elements, or ``None`` where the parameters give no valid POVM."""
        factors = _lower_triangular(np.reshape(x, (self._n_factors, self.dim**2)), self.dim)
        a = factors @ np.conj(np.swapaxes(factors, 1, 2))
        if self.mode == "normalized":
            s_inv_sqrt = _inv_sqrt(a.sum(axis=0))
            if s_inv_sqrt is None:
                return None
            out = s_inv_sqrt @ a @ s_inv_sqrt
        else:
            last = np.eye(self.dim) - a.sum(axis=0)
            out = np.concatenate([a, last[np.newaxis]])
        return (out + np.conj(np.swapaxes(out, 1, 2))) / 2

    def completion_margin(self, elements: np.ndarray) -> float:
        """Smallest eigenvalue of the completing element (``inf`` for the normalized mode)."""
        if self.mode == "normalized":
            return float("inf")
        return float(np.linalg.eigvalsh(elements[-1])[0])

    def random(self, rng: np.random.Generator) -> np.ndarray:
        """Draw a starting point; completion starts are scaled so that the completing element stays positive."""
        x = rng.standard_normal(self.n_params)
        if self.mode == "completion":
            x = x / (2 * np.sqrt(self.k * self.dim**2))
        return x


class VonNeumannParametrization:
    """Real coordinates of ``d`` effects ``E^i = U_i Π U_i*`` sharing the spectral template ``Π = diag(spectrum)``.

    ``U_i = exp(i H_i)`` where ``H_i`` is Hermitian with non-zero entries only at the index pairs whose spectrum
    entries differ (two real parameters per pair); the remaining generators commute with ``Π``.
    """

    def __init__(self, dim: int, d: int, spectrum: Sequence[float]):
        self.dim = dim
        self.d = d
        self.spectrum = np.asarray(spectrum, dtype=float)
        self.pairs = spectrum_pairs(self.spectrum)
        rows, cols = zip(*self.pairs)
        self._rows = np.array(rows)
        self._cols = np.array(cols)

    @property
    def n_params(self) -> int:
        return 2 * len(self.pairs) * self.d

    def unitaries(self, x: np.ndarray) -> np.ndarray:
        coeffs = np.reshape(x, (self.d, 2, len(self.pairs)))
        h = np.zeros((self.d, self.dim, self.dim), dtype=complex)
        h[:, self._rows, self._cols] = coeffs[:, 0] + 1j * coeffs[:, 1]
        h = h + np.conj(np.swapaxes(h, 1, 2))
        ev, vecs = np.linalg.eigh(h)
        return (vecs * np.exp(1j * ev)[:, np.newaxis, :]) @ np.conj(np.swapaxes(vecs, 1, 2))

    def effects(self, x: np.ndarray) -> np.ndarray:
        u = self.unitaries(x)
        out = (u * self.spectrum[np.newaxis, np.newaxis, :]) @ np.conj(np.swapaxes(u, 1, 2))
        return (out + np.conj(np.swapaxes(out, 1, 2))) / 2

    def random(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(-np.pi, np.pi, size=self.n_params)
