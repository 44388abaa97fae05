"""Deterministic chunked execution and reproducible basis-string sampling."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

# codes above this many bits no longer fit a signed 64-bit integer
_MAX_INT64_BITS = 62


def chunk_slices(total: int, size: int) -> list:
    """Fixed partition of ``range(total)``; independent of the worker count."""
    size = max(int(size), 1)
    return [slice(i, min(i + size, total)) for i in range(0, total, size)]


def run_chunks(func, chunks, threads: int = 1) -> list:
    """Apply ``func`` to each chunk, returning results in chunk order."""
    chunks = list(chunks)
    if threads is None or threads <= 1 or len(chunks) <= 1:
        return [func(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=int(threads)) as pool:
        return list(pool.map(func, chunks))


def code_array(codes, n: int) -> np.ndarray:
    if n <= _MAX_INT64_BITS:
        return np.asarray(codes, dtype=np.int64)
    return np.asarray([int(c) for c in codes], dtype=object)


def draw_codes(n: int, count: int, seed: int, stream: int = 0) -> np.ndarray:
    """``count`` uniform basis-string codes on ``n`` bits.

    Codes are 64-bit words from a counter-based Philox generator keyed by
    ``(seed, stream)`` and masked to ``n`` bits; strings longer than 64 bits
    concatenate several words.
    """
    bitgen = np.random.Philox(key=[int(seed) & (2**64 - 1), int(stream) & (2**64 - 1)])
    words_per_code = -(-n // 64)
    raw = bitgen.random_raw(count * words_per_code).reshape(count, words_per_code)
    if n <= _MAX_INT64_BITS:
        return (raw[:, 0] & np.uint64((1 << n) - 1)).astype(np.int64)
    out = []
    mask = (1 << n) - 1
    for row in raw:
        v = 0
        for w in row:
            v = (v << 64) | int(w)
        out.append(v & mask)
    return np.asarray(out, dtype=object)


def draw_pairs(n: int, count: int, seed: int) -> tuple:
    """Independent uniform ``(x, y)`` code pairs, ``x`` and ``y`` on separate streams."""
    return draw_codes(n, count, seed, stream=0), draw_codes(n, count, seed, stream=1)
