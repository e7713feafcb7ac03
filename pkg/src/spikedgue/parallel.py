"""Per-trial random streams and an order-preserving process pool map.

Trial ``t`` of an experiment with master seed ``s`` draws from a generator
seeded by a 64-bit value derived from ``SeedSequence(s, spawn_key=(t,))``.
That value is recorded with the trial, so any single trial can be replayed
with ``numpy.random.default_rng(seed)`` without rerunning the others.

BLAS/LAPACK threads are pinned to one inside every trial so the floating
point reduction order, and hence every output bit, does not depend on how
many worker processes run.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Callable, List, Sequence

import numpy as np
from threadpoolctl import threadpool_limits

WORKERS_ENV = "SPIKEDGUE_WORKERS"


def trial_seed(master_seed: int, t: int) -> int:
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(t),))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def trial_rng(master_seed: int, t: int) -> np.random.Generator:
    return np.random.default_rng(trial_seed(master_seed, t))


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw is None or raw == "":
        return 1
    n = int(raw)
    if n < 1:
        raise ValueError(f"{WORKERS_ENV} must be a positive integer, got {raw!r}")
    return n


def _run_chunk(fn: Callable, items: Sequence) -> list:
    with threadpool_limits(limits=1):
        return [fn(it) for it in items]


def ordered_map(fn: Callable, items: Sequence, workers: int = 1, chunk: int = 0) -> List:
    """``[fn(x) for x in items]``, optionally spread over worker processes.

    ``fn`` must be picklable when ``workers > 1``. Results come back in
    input order whatever the scheduling.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return _run_chunk(fn, items)
    if chunk <= 0:
        chunk = max(1, len(items) // (4 * workers))
    pieces = [items[i : i + chunk] for i in range(0, len(items), chunk)]
    out: List = []
    with ProcessPoolExecutor(max_workers=workers) as ex:
        for part in ex.map(partial(_run_chunk, fn), pieces):
            out.extend(part)
    return out
