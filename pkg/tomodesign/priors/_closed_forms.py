"""Closed-form objectives of symmetric designs and of the qubit partial-information problem."""
from dataclasses import dataclass
from typing import Any, Dict, Sequence

import numpy as np
import scipy.optimize

from tomodesign.utils.exceptions import DomainError, ValidationError

_FEASIBILITY_TOL = 1e-12


def _check_n(n: int):
    if int(n) != n or n < 2:
        raise ValidationError(f"Dimension must be an integer of at least 2, got {n}.")


def symmetric_objective(n: int, x: float, y: float, alpha: float) -> float:
    """Determinant objective of a symmetric ``n²``-outcome POVM with ``e_i = 1/n²``.

    ``x = <f_i, f_i>`` and ``y = <f_i, f_j>`` (``i != j``) are the Gram entries of the n-scaled traceless parts
    ``E_i = e_i (I + f_i·σ)``; ``alpha`` is the canonical per-coordinate second moment of the prior. The value is

        (n²/(x - y) - alpha)^(n² - 2) · (1/(x + (n² - 2) y) - alpha)

    and equals ``det <V>`` of :func:`~tomodesign.priors.avg_error_matrix` for such a POVM.

    Raises
    ------
    :exc:`~tomodesign.utils.exceptions.DomainError`
        if ``x <= y`` or ``x + (n² - 2) y <= 0``, where no Gram matrix of this shape exists

    """
    _check_n(n)
    n_sq = n * n
    if x <= y:
        raise DomainError(f"Symmetric objective needs x > y, got x={x}, y={y}.")
    s = x + (n_sq - 2) * y
    if s <= 0:
        raise DomainError(f"Symmetric objective needs x + (n² - 2) y > 0, got {s}.")
    return float((n_sq / (x - y) - alpha) ** (n_sq - 2) * (1 / s - alpha))


def symmetric_feasible(n: int, x: float, y: float, tol: float = _FEASIBILITY_TOL) -> bool:
    """Whether ``(x, y)`` belongs to a symmetric POVM.

    The Gram matrix must be positive definite (``x > y``, ``x + (n² - 2) y > 0``), every element must stay positive
    (``x <= n² - n``) and the completing element must be positive (``(n² - 1)(x + (n² - 2) y) <= n² - n``).
    """
    _check_n(n)
    n_sq = n * n
    s = x + (n_sq - 2) * y
    return bool(x > y and s > 0 and x <= n_sq - n + tol and (n_sq - 1) * s <= n_sq - n + tol)


@dataclass(frozen=True)
class SymmetricOptimum:
    """Result of :func:`minimize_symmetric_objective`."""

    n: int
    alpha: float
    x: float
    y: float
    value: float
    grid_min: float
    success: bool

    @property
    def expected_x(self) -> float:
        return float(self.n**2 - self.n)

    @property
    def expected_y(self) -> float:
        return -float(self.n**2 - self.n) / (self.n**2 - 1)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "alpha": self.alpha,
            "x": self.x,
            "y": self.y,
            "value": self.value,
            "grid_min": self.grid_min,
            "success": self.success,
            "expected_x": self.expected_x,
            "expected_y": self.expected_y,
        }


def symmetric_grid(n: int, points: int = 200) -> np.ndarray:
    """Return a ``points x points`` grid of feasible ``(x, y)`` pairs, shape ``(points**2, 2)``.

    The grid is regular in ``u = x - y`` and ``s = x + (n² - 2) y``; pairs violating ``x <= n² - n`` are dropped.
    """
    _check_n(n)
    n_sq = n * n
    s_max = (n_sq - n) / (n_sq - 1)
    u_max = (n_sq - 1) * (n_sq - n) / (n_sq - 2)
    u, s = np.meshgrid(np.linspace(0, u_max, points + 1)[1:], np.linspace(0, s_max, points + 1)[1:])
    u, s = u.ravel(), s.ravel()
    x = (u * (n_sq - 2) + s) / (n_sq - 1)
    y = (s - u) / (n_sq - 1)
    keep = x <= n_sq - n + _FEASIBILITY_TOL
    return np.column_stack([x[keep], y[keep]])


def minimize_symmetric_objective(n: int, alpha: float = 0.0, points: int = 200) -> SymmetricOptimum:
    """Minimize :func:`symmetric_objective` over the feasible ``(x, y)`` region.

    The best point of :func:`symmetric_grid` starts an SLSQP polish of the log-objective under the linear
    feasibility constraints. The minimum lies at ``x = n² - n``, ``y = -(n² - n)/(n² - 1)``.

    Parameters
    ----------
    n : int
        Hilbert space dimension
    alpha : float, optional
        canonical per-coordinate second moment of the prior, non-negative and small enough for both factors of
        the objective to stay positive on the feasible region
    points : int, optional
        grid resolution per axis

    Returns
    -------
    :class:`~tomodesign.priors.SymmetricOptimum`
        the optimum

    """
    _check_n(n)
    if alpha < 0:
        raise DomainError(f"alpha must be non-negative, got {alpha}.")
    n_sq = n * n
    top = n_sq - n

    def _log_objective(v: np.ndarray) -> float:
        x, y = v
        try:
            value = symmetric_objective(n, x, y, alpha)
        except DomainError:
            return 1e6
        if value <= 0:
            return 1e6
        return float(np.log(value))

    grid = symmetric_grid(n, points)
    values = np.array([_log_objective(v) for v in grid])
    start = grid[int(np.argmin(values))]

    constraints = [
        {"type": "ineq", "fun": lambda v: top - v[0]},
        {"type": "ineq", "fun": lambda v: top - (n_sq - 1) * (v[0] + (n_sq - 2) * v[1])},
        {"type": "ineq", "fun": lambda v: v[0] - v[1] - 1e-9},
        {"type": "ineq", "fun": lambda v: v[0] + (n_sq - 2) * v[1] - 1e-9},
    ]
    res = scipy.optimize.minimize(
        _log_objective,
        start,
        method="SLSQP",
        constraints=constraints,
        options={"ftol": 1e-15, "maxiter": 500},
    )
    x, y = (float(v) for v in res.x)
    return SymmetricOptimum(
        n=n,
        alpha=float(alpha),
        x=x,
        y=y,
        value=symmetric_objective(n, x, y, alpha),
        grid_min=float(np.exp(values.min())),
        success=bool(res.success),
    )


@dataclass(frozen=True)
class PartialObjectives:
    """Numerator ``A``, denominator ``B`` and the sign condition of the qubit partial-information objective.

    ``A/B`` equals four times ``det <V>`` in canonical units for the three-outcome POVM with estimating elements
    ``a0 (I + a·σ)`` and ``b0 (I + b·σ)`` under a circle prior with constant ``c``.
    """

    A: float  # noqa: N815
    B: float  # noqa: N815
    lemma_holds: bool
    C: np.ndarray  # noqa: N815
    D: np.ndarray  # noqa: N815

    @property
    def ratio(self) -> float:
        return float(self.A / self.B) if self.B > 0 else float("inf")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "A": self.A,
            "B": self.B,
            "ratio": self.ratio,
            "lemma_holds": self.lemma_holds,
            "C": self.C.tolist(),
            "D": self.D.tolist(),
        }


def _as_vector3(v: Sequence[float], name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float).ravel()
    if v.shape != (3,):
        raise ValidationError(f"'{name}' must have three components, got {v.shape[0]}.")
    return v


def qubit_partial_objectives(
    a: Sequence[float],
    b: Sequence[float],
    a0: float,
    b0: float,
    theta3: float,
    c: float,
    tol: float = 1e-12,
) -> PartialObjectives:
    """Evaluate ``A = det(D - cC)`` and ``B = det C`` for a three-outcome qubit POVM with ``θ3`` known.

    All quantities are in Pauli-normalized units: the estimating elements are ``a0 (I + a·σ)`` and ``b0 (I + b·σ)``,
    the known coordinate is ``θ3`` and the circle prior has ``c = radius²/2``. With ``p = 1 + a3 θ3``,
    ``q = 1 + b3 θ3``, ``C`` is the Gram matrix of the in-plane parts ``(a1, a2)`` and ``(b1, b2)`` and
    ``D = [[p/a0 - p², -pq], [-pq, q/b0 - q²]]``.

    Parameters
    ----------
    a, b : array_like
        Bloch directions of the two estimating elements, norm at most one
    a0, b0 : float
        traces (halved) of the two estimating elements, positive
    theta3 : float
        known coordinate, in ``[-1, 1]``
    c : float
        circle-prior constant, in ``[0, 1 - θ3²]``
    tol : float, optional
        tolerance of the parameter checks

    Returns
    -------
    :class:`~tomodesign.priors.PartialObjectives`
        ``A``, ``B`` and whether the off-diagonal entry ``d12 - c·c12`` is non-positive

    Raises
    ------
    :exc:`~tomodesign.utils.exceptions.ValidationError`
        if the parameters do not describe a POVM or the prior constant is out of range

    """
    a = _as_vector3(a, "a")
    b = _as_vector3(b, "b")
    if a0 <= 0 or b0 <= 0:
        raise ValidationError(f"a0 and b0 must be positive, got {a0} and {b0}.")
    if a0 + b0 > 1 + tol:
        raise ValidationError(f"a0 + b0 must not exceed one, got {a0 + b0}.")
    if np.linalg.norm(a) > 1 + tol or np.linalg.norm(b) > 1 + tol:
        raise ValidationError("The directions a and b must have norm at most one.")
    if np.linalg.norm(a0 * a + b0 * b) > 1 - a0 - b0 + tol:
        raise ValidationError("The completing element I - E1 - E2 is not positive.")
    if abs(theta3) > 1 + tol:
        raise ValidationError(f"theta3 must lie in [-1, 1], got {theta3}.")
    if c < -tol or c > 1 - theta3**2 + tol:
        raise ValidationError(f"c must lie in [0, 1 - theta3²] = [0, {1 - theta3**2}], got {c}.")

    p = 1 + a[2] * theta3
    q = 1 + b[2] * theta3
    planar = np.array([a[:2], b[:2]])
    c_mat = planar @ planar.T
    d_mat = np.array([[p / a0 - p * p, -p * q], [-p * q, q / b0 - q * q]])
    m = d_mat - c * c_mat
    return PartialObjectives(
        A=float(np.linalg.det(m)),
        B=float(np.linalg.det(c_mat)),
        lemma_holds=bool(m[0, 1] <= tol),
        C=c_mat,
        D=d_mat,
    )


def partial_b_bound(a3: float, b3: float) -> float:
    """``B`` of unit directions ``a``, ``b`` with ``|a + b| = 1`` (the boundary of ``a0 = b0 = 1/3``).

    Equals ``3/4 - a3² - a3 b3 - b3²``; the global maximum ``3/4`` needs ``a3 = b3 = 0``.
    """
    return float(0.75 - a3 * a3 - a3 * b3 - b3 * b3)
