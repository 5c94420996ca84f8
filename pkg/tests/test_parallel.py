import numpy as np
import pytest

from eraserlab.errors import ValidationError
from eraserlab.parallel import BLOCK_SIZE, block_generators, map_blocks


def _draw(rng, size):
    return rng.random(size)


@pytest.mark.parametrize("runs", [1, BLOCK_SIZE, BLOCK_SIZE + 1, 3 * BLOCK_SIZE + 17])
def test_block_sizes_cover_runs(runs):
    sizes = [s for _, s in block_generators(0, runs)]
    assert sum(sizes) == runs
    assert all(0 < s <= BLOCK_SIZE for s in sizes)


@pytest.mark.parametrize("workers", [2, 4, 8])
def test_worker_count_does_not_change_results(workers):
    runs = 5 * BLOCK_SIZE + 3
    ref = np.concatenate(map_blocks(_draw, 42, runs, workers=1))
    got = np.concatenate(map_blocks(_draw, 42, runs, workers=workers))
    np.testing.assert_array_equal(ref, got)


def test_seeds_differ():
    a = np.concatenate(map_blocks(_draw, 1, 100))
    b = np.concatenate(map_blocks(_draw, 2, 100))
    assert not np.array_equal(a, b)


def test_rejects_zero_runs():
    with pytest.raises(ValidationError):
        map_blocks(_draw, 0, 0)
