"""Counter-based RNG streams and a deterministic parallel map.

Every random draw in the package comes from a Philox generator keyed by
(master seed, lane, replicate index).  Philox is counter-based, so replicate
streams are independent and reproducible regardless of execution order and
worker count.  The parallel map below always splits work into fixed-size
chunks and reduces them in index order, which makes experiment outputs
byte-identical for any ``workers`` value.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

import numpy as np

# Fixed chunk size: must not depend on the worker count, or the chunk
# boundaries (and therefore any per-chunk vectorized draw order) would change
# the reduction and break byte-level determinism.
CHUNK = 256

# Lane constants separating the independent randomness consumers of one
# experiment run (path sampling vs. chi-squared replicates etc.).
LANE_PATHS = 1
LANE_CHI2 = 2
LANE_SPHERES = 3
LANE_MISC = 7


def stream_key(master_seed: int, lane: int, index: int) -> int:
    """Pack (seed, lane, index) into a unique 128-bit Philox key."""
    if not 0 <= master_seed < 2**64:
        raise ValueError("master seed must fit in u64")
    if not 0 <= index < 2**48:
        raise ValueError("replicate index must fit in 48 bits")
    if not 0 <= lane < 2**16:
        raise ValueError("lane must fit in 16 bits")
    return (master_seed << 64) | (lane << 48) | index


def generator(master_seed: int, lane: int, index: int) -> np.random.Generator:
    """Generator for one replicate; deterministic in its key alone."""
    return np.random.Generator(np.random.Philox(key=stream_key(master_seed, lane, index)))


def chunk_ranges(n_items: int):
    """[(start, stop), ...] covering range(n_items) in CHUNK-sized pieces."""
    return [(s, min(s + CHUNK, n_items)) for s in range(0, n_items, CHUNK)]


def parallel_chunked(fn, payload, n_items: int, workers: int):
    """Run ``fn(payload, start, stop)`` over fixed chunks, in-order reduce.

    ``fn`` must be a module-level function (pickled for worker processes) and
    must derive all randomness from the payload's master seed plus absolute
    replicate indices in [start, stop).  Returns the list of chunk results in
    chunk order.
    """
    ranges = chunk_ranges(n_items)
    if workers <= 1 or len(ranges) <= 1:
        return [fn(payload, s, e) for s, e in ranges]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, payload, s, e) for s, e in ranges]
        return [f.result() for f in futures]
