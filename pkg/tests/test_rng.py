import numpy as np
import pytest

from boundarylab.rng import stream


def test_same_tuple_same_stream():
    a = stream(42, 2, 7, 13).random(100)
    b = stream(42, 2, 7, 13).random(100)
    np.testing.assert_array_equal(a, b)


def test_distinct_components_distinct_streams():
    base = stream(42, 2, 7, 13).random(100)
    for other in (stream(42, 2, 7, 14), stream(42, 2, 8, 13),
                  stream(42, 3, 7, 13), stream(43, 2, 7, 13)):
        assert not np.array_equal(base, other.random(100))


def test_validation():
    with pytest.raises(ValueError):
        stream(-1, 1, 0, 0)
    with pytest.raises(ValueError):
        stream(1, 1, 0, -2)
    with pytest.raises(ValueError):
        stream(1.5, 1, 0, 0)
