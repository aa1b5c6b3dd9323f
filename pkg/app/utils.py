"""Utils for the biomarker discovery toolkit.

This module contains small helpers shared by the library modules.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")


def find_duplicates(ids: Sequence[str]) -> list[str]:
    """Find the identifiers that occur more than once.

    Args:
        ids (Sequence[str]): The identifiers to check.

    Returns:
        list[str]: The duplicated identifiers, in order of their second occurrence.
    """
    seen = set()
    duplicates: list[str] = []
    for identifier in ids:
        if identifier in seen and identifier not in duplicates:
            duplicates.append(identifier)
        seen.add(identifier)
    return duplicates


def derive_rng(seed: int, *keys: int) -> np.random.Generator:
    """Create a generator whose stream depends only on the seed and the keys.

    Args:
        seed (int): The base seed.
        *keys (int): Additional entropy, e.g. a round or class index.

    Returns:
        np.random.Generator: The generator.
    """
    return np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, *[int(k) for k in keys]])


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> list[R]:
    """Apply a function to every item, optionally on a thread pool.

    Results always come back in input order, so the output does not depend on the
    number of workers.

    Args:
        fn (Callable[[T], R]): The function to apply.
        items (Iterable[T]): The items.
        workers (int): The number of threads. Defaults to 1 (inline).

    Returns:
        list[R]: The results in input order.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))


def chunk_ranges(total: int, chunks: int) -> list[range]:
    """Split `range(total)` into at most `chunks` contiguous ranges.

    Args:
        total (int): The number of items.
        chunks (int): The maximum number of ranges.

    Returns:
        list[range]: The ranges, covering `range(total)` in order.
    """
    chunks = max(1, min(chunks, total))
    bounds = np.linspace(0, total, chunks + 1).astype(int)
    return [range(int(start), int(stop)) for start, stop in zip(bounds[:-1], bounds[1:], strict=True) if stop > start]


def one_hot(codes: np.ndarray, n_classes: int) -> np.ndarray:
    """Encode integer class codes as a one-hot matrix.

    Args:
        codes (np.ndarray): The class codes, shape (n,).
        n_classes (int): The number of classes.

    Returns:
        np.ndarray: The one-hot matrix, shape (n, n_classes).
    """
    encoded = np.zeros((codes.shape[0], n_classes))
    encoded[np.arange(codes.shape[0]), codes] = 1.0
    return encoded
