import numpy as np
import pytest
from hypothesis import given, strategies as st

from tipping_abm.rng import RngStream, derive_run_seed

U64 = st.integers(min_value=0, max_value=2**64 - 1)
COORD = st.integers(min_value=-(2**31), max_value=2**31 - 1)


def test_same_inputs_same_seed():
    assert derive_run_seed(123, (4, 5)) == derive_run_seed(123, (4, 5))


def test_grid_has_no_collisions():
    seen = {derive_run_seed(99, (i, j)) for i in range(100) for j in range(100)}
    assert len(seen) == 100 * 100


def test_empty_coordinates_frozen_value():
    # frozen from the documented SplitMix64 mixing spec; platform independent
    assert derive_run_seed(0, ()) == 16294208416658607535
    assert derive_run_seed(2**64 - 1, ()) == 16490336266968443936


@given(U64, st.tuples(COORD), st.tuples(COORD))
def test_distinct_coordinates_distinct_seeds(seed, a, b):
    if a != b:
        assert derive_run_seed(seed, a) != derive_run_seed(seed, b)


@given(U64)
def test_output_is_64_bit(seed):
    assert 0 <= derive_run_seed(seed, (1, 2, 3)) < 2**64


def test_stream_replays_bit_identically():
    a = RngStream(42)
    b = RngStream(42)
    assert [a.random() for _ in range(100)] == [b.random() for _ in range(100)]
    assert np.array_equal(a.random_block(50), b.random_block(50))


def test_draw_count_tracks_all_draw_kinds():
    rng = RngStream(1)
    rng.random()
    rng.random_block(10)
    rng.index(7)
    arr = np.arange(5)
    rng.shuffle(arr)
    assert rng.draw_count == 1 + 10 + 1 + 4


def test_index_in_range():
    rng = RngStream(3)
    ks = [rng.index(7) for _ in range(1000)]
    assert min(ks) == 0 and max(ks) == 6


def test_shuffle_is_a_permutation():
    rng = RngStream(9)
    arr = np.arange(50)
    rng.shuffle(arr)
    assert sorted(arr.tolist()) == list(range(50))
