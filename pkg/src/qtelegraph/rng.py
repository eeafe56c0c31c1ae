"""Named, seed-derived random streams for reproducible simulations.

Every stochastic routine in this package consumes a ``numpy.random.Generator``.
Top-level entry points derive that generator from an explicit integer seed
plus a stream path (e.g. the subcommand name, a telegraph index, a trial
index), so serial and parallel executions of the same experiment consume
identical random numbers stream by stream.
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def _stream_word(part: int | str) -> int:
    if isinstance(part, (int, np.integer)):
        return int(part) & _MASK64
    if isinstance(part, str):
        digest = hashlib.sha256(part.encode("utf-8")).digest()
        return int.from_bytes(digest[:8], "little")
    raise TypeError(f"stream path parts must be int or str, got {type(part).__name__}")


def stream(seed: int, *path: int | str) -> np.random.Generator:
    """Return the generator for the named substream ``(seed, *path)``.

    The same (seed, path) pair always yields the same stream, and distinct
    paths yield statistically independent streams, so per-telegraph or
    per-trial streams agree between serial and parallel runs.
    """
    words = tuple(_stream_word(p) for p in path)
    seq = np.random.SeedSequence(int(seed) & _MASK64, spawn_key=words)
    return np.random.default_rng(seq)


def child_seeds(rng: np.random.Generator, count: int) -> np.ndarray:
    """Draw ``count`` independent child seeds from ``rng``.

    Drawing all seeds up front in index order makes the children independent
    of later consumption order, which keeps indexed sub-simulations (one per
    symbol, one per trial) deterministic however they are scheduled.
    """
    return rng.integers(0, 2**63, size=count, dtype=np.int64)
