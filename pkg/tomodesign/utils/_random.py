"""Random matrices, seeded block streams and jackknife standard errors."""
from typing import Callable, List, Optional, Tuple

import numpy as np

DEFAULT_MAX_BLOCKS = 64


def haar_unitaries(dim: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``size`` Haar-distributed unitaries of dimension ``dim``.

    Complex Ginibre matrices are QR-decomposed and every column of ``Q`` is multiplied by the phase of the
    corresponding diagonal entry of ``R``, which makes the distribution of ``Q`` exactly Haar.

    Parameters
    ----------
    dim : int
        matrix dimension
    size : int
        number of unitaries
    rng : :class:`~numpy.random.Generator`
        random generator

    Returns
    -------
    :class:`~numpy.ndarray`
        array of shape ``(size, dim, dim)``

    """
    z = (rng.standard_normal((size, dim, dim)) + 1j * rng.standard_normal((size, dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=1, axis2=2)
    phases = diag / np.abs(diag)
    return q * phases[:, np.newaxis, :]


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Draw a single Haar-distributed unitary."""
    return haar_unitaries(dim, 1, rng)[0]


def random_density_matrix(dim: int, rng: np.random.Generator, rank: Optional[int] = None) -> np.ndarray:
    """Draw a random density matrix from the induced (Ginibre) measure.

    Parameters
    ----------
    dim : int
        matrix dimension
    rng : :class:`~numpy.random.Generator`
        random generator
    rank : int, optional
        rank of the state, ``dim`` (full rank) if ``None``. ``rank=1`` yields pure states.

    """
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return rho / np.trace(rho).real


def block_partition(total: int, max_blocks: int = DEFAULT_MAX_BLOCKS) -> List[Tuple[int, int]]:
    """Split ``range(total)`` into at most ``max_blocks`` contiguous ``(start, stop)`` blocks.

    The partition only depends on ``total``, so work distributed over any number of threads reproduces the
    same per-block random streams.
    """
    if total < 1:
        raise ValueError(f"'total' must be positive, got {total}.")
    n_blocks = min(total, max_blocks)
    edges = np.linspace(0, total, n_blocks + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]


def block_generators(seed: int, n_blocks: int) -> List[np.random.Generator]:
    """Return independent generators, one per block, spawned from ``SeedSequence(seed)``."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n_blocks)]


def grouped_jackknife(
    group_sums: np.ndarray, group_counts: np.ndarray, statistic: Callable[[np.ndarray], np.ndarray]
) -> Tuple[np.ndarray, np.ndarray]:
    """Grouped (delete-one-group) jackknife of a statistic of a sample mean.

    Parameters
    ----------
    group_sums : :class:`~numpy.ndarray`
        per-group sums of the sampled quantity, shape ``(G, ...)``
    group_counts : :class:`~numpy.ndarray`
        number of samples in every group, shape ``(G,)``
    statistic : callable
        function mapping a mean (shape ``(...)``) to the statistic of interest

    Returns
    -------
    estimate : :class:`~numpy.ndarray`
        statistic of the full-sample mean
    stderr : :class:`~numpy.ndarray`
        jackknife standard error (zeros when fewer than two groups are available)

    """
    group_sums = np.asarray(group_sums, dtype=float)
    group_counts = np.asarray(group_counts, dtype=float)
    total_sum = group_sums.sum(axis=0)
    total_count = group_counts.sum()
    estimate = np.asarray(statistic(total_sum / total_count), dtype=float)
    n_groups = len(group_counts)
    if n_groups < 2:
        return estimate, np.zeros_like(estimate)
    leave_out = np.stack(
        [
            np.asarray(statistic((total_sum - group_sums[g]) / (total_count - group_counts[g])), dtype=float)
            for g in range(n_groups)
        ]
    )
    centered = leave_out - leave_out.mean(axis=0)
    stderr = np.sqrt((n_groups - 1) / n_groups * np.sum(centered**2, axis=0))
    return estimate, stderr
