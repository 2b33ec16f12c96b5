"""Tests for seedable streams, substream splitting and the thread helper."""

import numpy as np
import pytest

from subfield.stochastics.rng import MASK64, RngStream, parallel_map, split_stream_id, stable_sum


def test_same_seed_and_stream_reproduce():
    a = RngStream(42, 7).generator.random(16)
    b = RngStream(42, 7).generator.random(16)
    np.testing.assert_array_equal(a, b)


def test_streams_differ_by_id_and_seed():
    base = RngStream(42, 0).generator.random(8)
    assert not np.array_equal(base, RngStream(42, 1).generator.random(8))
    assert not np.array_equal(base, RngStream(43, 0).generator.random(8))


def test_split_stream_id_is_deterministic_and_spreads():
    ids = [split_stream_id(5, i) for i in range(100)]
    assert ids == [split_stream_id(5, i) for i in range(100)]
    assert len(set(ids)) == 100
    assert all(0 <= i <= MASK64 for i in ids)
    assert split_stream_id(5, 0) != split_stream_id(6, 0)


def test_split_stream_id_rejects_negative_index():
    with pytest.raises(ValueError):
        split_stream_id(0, -1)


def test_substream_and_spawn():
    root = RngStream(3, 11)
    child = root.substream(2)
    assert child.seed == 3
    assert child.stream_id == split_stream_id(11, 2)
    spawned = root.spawn(4)
    assert [s.stream_id for s in spawned] == [root.substream(i).stream_id for i in range(4)]
    # the parent's draws are untouched by splitting
    np.testing.assert_array_equal(root.generator.random(4), RngStream(3, 11).generator.random(4))


@pytest.mark.parametrize("seed, stream_id", [(-1, 0), (0, -1), (MASK64 + 1, 0)])
def test_invalid_labels(seed, stream_id):
    with pytest.raises(ValueError):
        RngStream(seed, stream_id)


def test_parallel_map_keeps_order():
    assert parallel_map(lambda x: x * x, range(10), threads=4) == [x * x for x in range(10)]


def test_parallel_map_independent_of_threads():
    streams = RngStream(9).spawn(6)

    def draw(stream):
        return float(RngStream(stream.seed, stream.stream_id).generator.normal())

    assert parallel_map(draw, streams, threads=1) == parallel_map(draw, streams, threads=3)


def test_stable_sum_is_compensated():
    assert stable_sum([1e16, 1.0, -1e16]) == 1.0
    assert stable_sum([]) == 0.0


def test_repr_names_labels():
    assert repr(RngStream(1, 2)) == "RngStream(seed=1, stream_id=2)"
