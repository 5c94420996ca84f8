"""Seeded Monte Carlo batching.

Runs are cut into fixed-size blocks; block ``k`` draws from the ``k``-th
child of ``SeedSequence(seed)``. The block layout depends only on the run
count, so results are identical for any worker count.
"""
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import ValidationError

BLOCK_SIZE = 8192


def block_generators(seed, runs, block_size=BLOCK_SIZE):
    """Yield (generator, block_length) pairs covering ``runs`` draws."""
    nblocks = -(-runs // block_size)
    children = np.random.SeedSequence(seed).spawn(nblocks)
    for k, child in enumerate(children):
        size = min(block_size, runs - k * block_size)
        yield np.random.default_rng(child), size


def map_blocks(fn, seed, runs, workers=1, block_size=BLOCK_SIZE):
    """Apply ``fn(rng, size)`` to every block and return results in block order."""
    if runs < 1:
        raise ValidationError("runs must be >= 1")
    blocks = list(block_generators(seed, runs, block_size))
    if workers is None or workers <= 1 or len(blocks) == 1:
        return [fn(rng, size) for rng, size in blocks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda b: fn(*b), blocks))
