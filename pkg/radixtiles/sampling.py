"""Batched int64 branch search and seeded chunking shared by the tile and wavelet estimators.

A sample point x is held as the integer vector X = 2^bits x, and every branch x -> A x - d becomes
X -> A X - 2^bits d, so the search runs on whole numpy arrays without rounding.
"""

from concurrent.futures import ProcessPoolExecutor
from math import ceil, floor, log2
from typing import Any, Callable, Iterable, List, NamedTuple, Optional, Tuple

import numpy as np

from radixtiles import config, defaults
from radixtiles.digits import DigitSet
from radixtiles.errors import ResourceLimit, SpecValueError
from radixtiles.radix import lattice_points


class SearchContext(NamedTuple):
    """Integer data of a batched int64 membership search.

    ``cover`` is any object with a ``contains(points) -> bool array`` method, or None for ball pruning only.
    """

    transposed: np.ndarray
    digits: np.ndarray
    radius: float
    cover: Optional[Any]
    row_bound: int
    digit_bound: int

    @classmethod
    def of(cls, digit_set: DigitSet, radius: float, cover: Optional[Any] = None) -> "SearchContext":
        return cls(
            transposed=np.array(digit_set.matrix.transpose().rows, dtype=np.int64),
            digits=np.array(digit_set.digits, dtype=np.int64),
            radius=radius,
            cover=cover,
            row_bound=digit_set.matrix.max_abs_row_sum(),
            digit_bound=max(max(abs(c) for c in d) for d in digit_set),
        )


def sampling_settings(
    samples: Optional[int] = None, depth: Optional[int] = None, seed: Optional[int] = None
) -> Tuple[int, int, int]:
    """Fill unset sampling parameters from the configuration.

    Raises
    ------
    SpecValueError
        If samples or depth is not positive.
    """
    settings = config.get_sampling_defaults()
    samples = settings["samples"] if samples is None else samples
    depth = settings["depth"] if depth is None else depth
    seed = settings["seed"] if seed is None else seed
    if samples < 1:
        raise SpecValueError("samples", "must be positive")
    if depth < 1:
        raise SpecValueError("depth", "must be positive")
    return samples, depth, seed


def sample_bits(context: SearchContext, window: float) -> int:
    """Dyadic resolution such that every state of the search fits into int64."""
    largest = max(context.row_bound * context.radius + context.digit_bound, window) + 1
    bits = min(defaults.SAMPLE_BITS, 61 - ceil(log2(largest)))
    if bits < 8:
        raise ResourceLimit("sampling resolution bits", bits, 8)
    return bits


def survival_depths(context: SearchContext, states: np.ndarray, scale: int, depth: int) -> np.ndarray:
    """Deepest level at which each start state (rows, scaled by ``scale``) still has a live branch, -1 if none."""
    q, n = context.digits.shape
    last = np.full(len(states), -1, dtype=np.int64)
    origins = np.arange(len(states))
    limit = (context.radius * scale) ** 2 * (1 + 1e-9)
    scaled_digits = context.digits * scale

    for level in range(depth + 1):
        values = states.astype(float)
        keep = (values * values).sum(axis=1) <= limit
        if context.cover is not None and keep.any():
            keep[keep] = context.cover.contains(values[keep] / scale)
        states, origins = states[keep], origins[keep]
        if not len(origins):
            break
        last[origins] = level
        if level == depth:
            break
        states = ((states @ context.transposed)[:, None, :] - scaled_digits[None, :, :]).reshape(-1, n)
        origins = np.repeat(origins, q)

    return last


def chunk_generators(seed: int, samples: int) -> List[Tuple[int, np.random.SeedSequence]]:
    """(size, seed sequence) per chunk; the split depends on seed and samples only."""
    chunk = defaults.SAMPLE_CHUNK
    sizes = [min(chunk, samples - start) for start in range(0, samples, chunk)]
    return list(zip(sizes, np.random.SeedSequence(seed).spawn(len(sizes))))


def map_chunks(function: Callable, tasks: Iterable, jobs: int = 1) -> list:
    """Apply ``function`` to every task, in worker processes when jobs > 1. Results keep the task order."""
    tasks = list(tasks)
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            return list(executor.map(function, tasks))
    return [function(task) for task in tasks]


def uniform_dyadic(rng: np.random.Generator, size: int, n: int, half_width: float, bits: int) -> np.ndarray:
    """Integers X with X / 2^bits uniform on the dyadic grid of [-half_width, half_width)^n."""
    extent = int(ceil(half_width * 2**bits))
    return rng.integers(-extent, extent, size=(size, n), dtype=np.int64)


def translates(n: int, radius: float) -> np.ndarray:
    """Lattice vectors of norm at most ``radius`` as an int64 array of shape (count, n)."""
    return np.array(list(lattice_points(n, floor(radius * radius * (1 + 1e-9)))), dtype=np.int64).reshape(-1, n)
