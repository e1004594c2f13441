"""Deterministic fan-out of bootstrap replicates over a thread pool."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

# stage tags keep the SE and GOF bootstraps on unrelated streams for one seed
SE_STAGE = 1
GOF_STAGE = 2


def replicate_seeds(seed: int, stage: int, count: int) -> np.ndarray:
    """One 32-bit seed per replicate, a pure function of (seed, stage, index)."""
    out = np.empty(count, dtype=np.int64)
    for r in range(count):
        out[r] = np.random.SeedSequence([int(seed), stage, r]).generate_state(1)[0]
    return out


def resolve_workers(workers: int | None) -> int:
    if workers is None or workers <= 0:
        return os.cpu_count() or 1
    return int(workers)


def run_chunked(task, count: int, workers: int | None = 1) -> None:
    """Call ``task(lo, hi)`` over disjoint slices covering ``range(count)``.

    Tasks write their results into preallocated arrays by index, so the
    outcome does not depend on scheduling.
    """
    workers = resolve_workers(workers)
    if workers == 1 or count < 2:
        task(0, count)
        return
    n_chunks = min(count, workers * 4)
    edges = np.linspace(0, count, n_chunks + 1).astype(int)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(task, lo, hi) for lo, hi in zip(edges[:-1], edges[1:]) if hi > lo]
        for fut in futures:
            fut.result()
