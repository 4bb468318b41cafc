"""Unitarily invariant priors over states and their Bloch-vector moments."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np

from tomodesign.basis import OperatorBasis, from_pauli_scale, get_basis
from tomodesign.utils._random import block_generators, block_partition, haar_unitaries
from tomodesign.utils.exceptions import DesignParseError, UnphysicalPriorError, ValidationError
from tomodesign.utils.utils import handle_issue

PRIOR_KINDS = ("haar_orbit", "two_point_qubit", "circle_qubit")

_SPECTRUM_TOL = 1e-12
_QUBIT_TOL = 1e-12


@dataclass(frozen=True)
class InvariantPrior:
    """A distribution over states that is invariant under the symmetry the design problem has.

    ``haar_orbit`` is the orbit ``{U diag(spectrum) U*}`` under Haar-random ``U``. The qubit kinds fix ``θ3`` (given
    in Pauli-normalized units, ``ρ = (I + θ·σ)/2``): ``two_point_qubit`` puts equal weight on ``(θ1, θ2, ±θ3)`` and
    ``circle_qubit`` is uniform on the circle of radius ``radius`` around the ``σ3`` axis at height ``θ3``.

    Attributes
    ----------
    dim : int
        Hilbert space dimension
    kind : str
        one of ``"haar_orbit"``, ``"two_point_qubit"``, ``"circle_qubit"``
    alpha : float
        per-coordinate second moment of the unknown coordinates in canonical units
    spectrum : tuple of float, optional
        eigenvalues of the orbit (``haar_orbit``)
    theta3 : float, optional
        ``σ3`` coordinate (qubit kinds, Pauli-normalized units)
    radius : float, optional
        circle radius (``circle_qubit``, Pauli-normalized units)
    theta12 : tuple of float
        fixed ``(θ1, θ2)`` of ``two_point_qubit`` (Pauli-normalized units)

    """

    dim: int
    kind: Literal["haar_orbit", "two_point_qubit", "circle_qubit"]
    alpha: float
    spectrum: Optional[Tuple[float, ...]] = None
    theta3: Optional[float] = None
    radius: Optional[float] = None
    theta12: Tuple[float, float] = (0.0, 0.0)

    @property
    def n_params(self) -> int:
        return self.dim**2 - 1

    @property
    def alpha_pauli(self) -> float:
        """``alpha`` in Pauli-normalized qubit units (twice the canonical value)."""
        return 2 * self.alpha

    @property
    def c(self) -> Optional[float]:
        """The circle constant ``radius² / 2`` (``circle_qubit`` only)."""
        return None if self.radius is None else self.radius**2 / 2

    def moments(self, basis: Optional[OperatorBasis] = None) -> Tuple[np.ndarray, np.ndarray]:
        """Return mean ``m`` and second moment ``S = E[θ θᵀ]`` of the canonical Bloch vector.

        The qubit kinds refer to the third coordinate as ``σ3``, which is the same direction in the Gell-Mann and
        the Pauli-product basis of one qubit. ``haar_orbit`` moments (``m = 0``, ``S = α I``) hold in every
        orthonormal basis.
        """
        if basis is not None and basis.dim != self.dim:
            raise ValidationError(f"Basis dimension {basis.dim} does not match prior dimension {self.dim}.")
        n_params = self.n_params
        if self.kind == "haar_orbit":
            return np.zeros(n_params), self.alpha * np.eye(n_params)
        t1, t2 = from_pauli_scale(self.theta12)
        t3 = float(from_pauli_scale(self.theta3))
        if self.kind == "two_point_qubit":
            mean = np.array([t1, t2, 0.0])
            second = np.array([[t1 * t1, t1 * t2, 0.0], [t1 * t2, t2 * t2, 0.0], [0.0, 0.0, t3 * t3]])
            return mean, second
        r = float(from_pauli_scale(self.radius))
        return np.array([0.0, 0.0, t3]), np.diag([r * r / 2, r * r / 2, t3 * t3])

    def sample(self, samples: int, rng: np.random.Generator, basis: Optional[OperatorBasis] = None) -> np.ndarray:
        """Draw ``samples`` canonical Bloch vectors, shape ``(samples, n² - 1)``."""
        if self.kind == "haar_orbit":
            basis = basis if basis is not None else get_basis(self.dim)
            u = haar_unitaries(self.dim, samples, rng)
            rho = (u * np.asarray(self.spectrum)[np.newaxis, np.newaxis, :]) @ np.conj(np.swapaxes(u, 1, 2))
            return basis.coefficients(rho)
        t1, t2 = from_pauli_scale(self.theta12)
        t3 = float(from_pauli_scale(self.theta3))
        if self.kind == "two_point_qubit":
            signs = rng.choice([-1.0, 1.0], size=samples)
            return np.column_stack([np.full(samples, t1), np.full(samples, t2), signs * t3])
        r = float(from_pauli_scale(self.radius))
        phi = rng.uniform(0, 2 * np.pi, size=samples)
        return np.column_stack([r * np.cos(phi), r * np.sin(phi), np.full(samples, t3)])

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"kind": self.kind, "dim": self.dim, "alpha": self.alpha}
        if self.kind == "haar_orbit":
            out["spectrum"] = list(self.spectrum)
        else:
            out["theta3"] = self.theta3
        if self.kind == "two_point_qubit":
            out["theta12"] = list(self.theta12)
        if self.kind == "circle_qubit":
            out["radius"] = self.radius
            out["c"] = self.c
        return out


def _haar_alpha(spectrum: np.ndarray) -> float:
    n = len(spectrum)
    return float((spectrum @ spectrum - 1 / n) / (n**2 - 1))


def _validate_theta3(theta3) -> float:
    if theta3 is None:
        raise ValidationError("Qubit priors need 'theta3'.")
    theta3 = float(theta3)
    if abs(theta3) > 1 + _QUBIT_TOL:
        raise UnphysicalPriorError(f"theta3 must lie in [-1, 1], got {theta3}.")
    return theta3


def make_prior(
    kind: Literal["haar_orbit", "two_point_qubit", "circle_qubit"],
    spectrum: Optional[Sequence[float]] = None,
    theta3: Optional[float] = None,
    radius: Optional[float] = None,
    c: Optional[float] = None,
    theta12: Sequence[float] = (0.0, 0.0),
    verify_alpha: bool = False,
    verify_samples: int = 100_000,
    seed: int = 0,
    error_handling: Literal["ignore", "warn", "raise"] = "raise",
) -> InvariantPrior:
    """Create an invariant prior and compute its moment constant ``alpha`` in closed form.

    Parameters
    ----------
    kind : str
        ``"haar_orbit"``, ``"two_point_qubit"`` or ``"circle_qubit"``
    spectrum : list of float, optional
        eigenvalues of the orbit, required for ``haar_orbit``; non-negative and summing to one
    theta3 : float, optional
        ``σ3`` coordinate in Pauli-normalized units, required for the qubit kinds
    radius : float, optional
        circle radius for ``circle_qubit``, ``radius² <= 1 - theta3²``
    c : float, optional
        alternative to ``radius`` for ``circle_qubit``: ``c = radius² / 2``
    theta12 : pair of float, optional
        fixed ``(θ1, θ2)`` of ``two_point_qubit``
    verify_alpha : bool, optional
        whether to confirm ``alpha`` against the Monte Carlo moments (within 1% or four standard errors)
    verify_samples : int, optional
        number of samples of the verification
    seed : int, optional
        seed of the verification
    error_handling : one of {"ignore", "warn", "raise"}, optional
        how a failed verification is reported. Default: "raise"

    Returns
    -------
    :class:`~tomodesign.priors.InvariantPrior`
        the prior

    Raises
    ------
    :exc:`~tomodesign.utils.exceptions.UnphysicalPriorError`
        if the parameters describe states outside of the state space
    :exc:`~tomodesign.utils.exceptions.ValidationError`
        if the kind is unknown or required parameters are missing

    """
    if kind == "haar_orbit":
        prior = _make_haar_orbit(spectrum)
    elif kind == "two_point_qubit":
        t3 = _validate_theta3(theta3)
        t12 = tuple(float(x) for x in theta12)
        if len(t12) != 2:
            raise ValidationError(f"theta12 must have two entries, got {len(t12)}.")
        if t12[0] ** 2 + t12[1] ** 2 + t3**2 > 1 + _QUBIT_TOL:
            raise UnphysicalPriorError(f"Points {(*t12, t3)} lie outside of the Bloch ball.")
        prior = InvariantPrior(dim=2, kind=kind, alpha=t3**2 / 2, theta3=t3, theta12=t12)
    elif kind == "circle_qubit":
        t3 = _validate_theta3(theta3)
        if (radius is None) == (c is None):
            raise ValidationError("circle_qubit needs exactly one of 'radius' and 'c'.")
        if c is not None:
            if c < 0:
                raise UnphysicalPriorError(f"c must be non-negative, got {c}.")
            radius = float(np.sqrt(2 * c))
        radius = float(radius)
        if radius < 0 or radius**2 > 1 - t3**2 + _QUBIT_TOL:
            raise UnphysicalPriorError(f"radius² must lie in [0, 1 - theta3²] = [0, {1 - t3**2}], got {radius**2}.")
        prior = InvariantPrior(dim=2, kind=kind, alpha=radius**2 / 4, theta3=t3, radius=radius)
    else:
        raise ValidationError(f"Unknown prior kind {kind!r}. Must be one of {PRIOR_KINDS}.")
    if verify_alpha:
        verify_prior_alpha(prior, samples=verify_samples, seed=seed, error_handling=error_handling)
    return prior


def _make_haar_orbit(spectrum: Optional[Sequence[float]]) -> InvariantPrior:
    if spectrum is None:
        raise ValidationError("haar_orbit priors need a 'spectrum'.")
    spec = np.asarray(spectrum, dtype=float).ravel()
    if len(spec) < 2:
        raise ValidationError(f"Spectrum must have at least two entries, got {len(spec)}.")
    if np.any(spec < -_SPECTRUM_TOL) or abs(spec.sum() - 1) > _SPECTRUM_TOL:
        raise UnphysicalPriorError(f"Spectrum must be non-negative and sum to one, got {spec.tolist()}.")
    return InvariantPrior(
        dim=len(spec), kind="haar_orbit", alpha=_haar_alpha(spec), spectrum=tuple(float(x) for x in spec)
    )


def prior_from_dict(data: Dict[str, Any]) -> InvariantPrior:
    """Create a prior from its JSON form, e.g. ``{"kind": "haar_orbit", "spectrum": [1, 0]}``.

    Raises
    ------
    :exc:`~tomodesign.utils.exceptions.DesignParseError`
        if the document is malformed

    """
    if not isinstance(data, dict) or "kind" not in data:
        raise DesignParseError("prior: expected an object with a 'kind' field")
    allowed = {"kind", "spectrum", "theta3", "radius", "c", "theta12", "dim", "alpha"}
    unknown = set(data) - allowed
    if unknown:
        raise DesignParseError(f"prior: unknown field(s) {sorted(unknown)}")
    kwargs = {k: data[k] for k in ("spectrum", "theta3", "radius", "c", "theta12") if k in data}
    for key in ("theta3", "radius", "c"):
        if key in kwargs and (isinstance(kwargs[key], bool) or not isinstance(kwargs[key], (int, float))):
            raise DesignParseError(f"prior.{key}: expected a number, got {kwargs[key]!r}")
    return make_prior(data["kind"], **kwargs)


@dataclass(frozen=True)
class MomentEstimate:
    """Monte Carlo moments of the canonical Bloch vector under a prior."""

    mean: np.ndarray
    mean_stderr: np.ndarray
    second: np.ndarray
    second_stderr: np.ndarray
    samples: int
    seed: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mean": self.mean.tolist(),
            "mean_stderr": self.mean_stderr.tolist(),
            "second": self.second.tolist(),
            "second_stderr": self.second_stderr.tolist(),
            "samples": self.samples,
            "seed": self.seed,
        }


def map_prior_blocks(
    prior: InvariantPrior,
    samples: int,
    seed: int,
    func: Callable[[np.ndarray], Any],
    basis: Optional[OperatorBasis] = None,
    threads: int = 1,
) -> List[Any]:
    """Apply ``func`` to the Bloch vectors of every sample block and return the results in block order.

    Samples are generated in a fixed block partition with one ``SeedSequence`` child per block, so the results do
    not depend on ``threads``.
    """
    blocks = block_partition(samples)
    generators = block_generators(seed, len(blocks))

    def _run(i: int) -> Any:
        start, stop = blocks[i]
        return func(prior.sample(stop - start, generators[i], basis))

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        return list(pool.map(_run, range(len(blocks))))


def sample_states(
    prior: InvariantPrior,
    samples: int,
    seed: int = 0,
    basis: Optional[OperatorBasis] = None,
    threads: int = 1,
) -> np.ndarray:
    """Draw ``samples`` canonical Bloch vectors from a prior, deterministically given ``seed``."""
    return np.concatenate(map_prior_blocks(prior, samples, seed, lambda t: t, basis=basis, threads=threads))


def _power_sums(thetas: np.ndarray) -> Tuple[np.ndarray, ...]:
    products = thetas[:, :, np.newaxis] * thetas[:, np.newaxis, :]
    return (
        thetas.sum(axis=0),
        (thetas**2).sum(axis=0),
        products.sum(axis=0),
        (products**2).sum(axis=0),
    )


def estimate_moments(
    prior: InvariantPrior,
    samples: int,
    seed: int = 0,
    basis: Optional[OperatorBasis] = None,
    threads: int = 1,
) -> MomentEstimate:
    """Estimate the first and second moments of the Bloch vector (with standard errors) by sampling."""
    sums = [sum(parts) for parts in zip(*map_prior_blocks(prior, samples, seed, _power_sums, basis, threads))]
    s1, s1_sq, s2, s2_sq = sums
    mean = s1 / samples
    second = s2 / samples
    ddof = 1 if samples > 1 else 0
    mean_var = np.maximum(s1_sq / samples - mean**2, 0) * samples / (samples - ddof)
    second_var = np.maximum(s2_sq / samples - second**2, 0) * samples / (samples - ddof)
    return MomentEstimate(
        mean=mean,
        mean_stderr=np.sqrt(mean_var / samples),
        second=second,
        second_stderr=np.sqrt(second_var / samples),
        samples=samples,
        seed=seed,
    )


def verify_prior_alpha(
    prior: InvariantPrior,
    samples: int = 100_000,
    seed: int = 0,
    rel_tol: float = 0.01,
    error_handling: Literal["ignore", "warn", "raise"] = "raise",
) -> bool:
    """Confirm the closed-form second moments of the unknown coordinates against Monte Carlo.

    Every diagonal entry of the sampled second moment must agree with the closed form within ``rel_tol`` (relative)
    or four standard errors, whichever is larger.

    Returns
    -------
    bool
        whether the check passed

    """
    _, second = prior.moments()
    estimated = estimate_moments(prior, samples, seed=seed)
    expected = np.diag(second)
    deviation = np.abs(np.diag(estimated.second) - expected)
    allowed = np.maximum(rel_tol * np.abs(expected), 4 * np.diag(estimated.second_stderr)) + 1e-15
    ok = bool(np.all(deviation <= allowed))
    if not ok:
        handle_issue(
            f"Monte Carlo second moments {np.diag(estimated.second).tolist()} do not confirm the closed form "
            f"{expected.tolist()} of the {prior.kind} prior.",
            UnphysicalPriorError,
            error_handling,
        )
    return ok
