from __future__ import annotations

from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor

import numpy as np

MIN_CHUNK = 65_536


def map_chunks(
    func: Callable[[np.ndarray], np.ndarray],
    values: np.ndarray,
    threads: int = 1,
) -> np.ndarray:
    """Apply a vectorized ``func`` to ``values`` in contiguous chunks.

    Chunks are concatenated in input order, so the result does not depend on
    scheduling. Small inputs and ``threads == 1`` run inline.
    """
    values = np.asarray(values)
    if threads <= 1 or values.size < 2 * MIN_CHUNK:
        return np.asarray(func(values))
    count = min(threads, values.size // MIN_CHUNK)
    pieces = np.array_split(values, count)
    with ThreadPoolExecutor(max_workers=count) as pool:
        results = list(pool.map(func, pieces))
    return np.concatenate(results, axis=-1)
