import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adanode.grid import TimeGrid, insert_midpoint, uniform


def test_single_interval():
    g = uniform(1, 20.0)
    np.testing.assert_array_equal(g.nodes, [0.0, 20.0])


def test_uniform_tau():
    g = uniform(4, 20.0)
    np.testing.assert_allclose(g.tau, 5.0)


def test_uniform_midpoints():
    g = uniform(4, 20.0)
    np.testing.assert_allclose(g.midpoints, [2.5, 7.5, 12.5, 17.5])


def test_invalid_arguments():
    with pytest.raises(ValueError):
        uniform(0, 1.0)
    with pytest.raises(ValueError):
        uniform(3, 0.0)
    with pytest.raises(ValueError):
        TimeGrid(np.array([0.0, 1.0, 0.5]))
    with pytest.raises(ValueError):
        TimeGrid(np.array([1.0, 2.0]))


def test_insert_into_single_interval():
    g = insert_midpoint(uniform(1, 20.0), 1)
    np.testing.assert_array_equal(g.nodes, [0.0, 10.0, 20.0])


def test_insert_second_interval():
    g = insert_midpoint(TimeGrid(np.array([0.0, 10.0, 20.0])), 2)
    np.testing.assert_array_equal(g.nodes, [0.0, 10.0, 15.0, 20.0])


def test_repeated_insertion_bisects_first_interval():
    g = uniform(1, 16.0)
    for expected in (8.0, 4.0, 2.0, 1.0):
        g = insert_midpoint(g, 1)
        assert g.tau[0] == expected


def test_index_out_of_range():
    g = uniform(2, 1.0)
    with pytest.raises(IndexError):
        insert_midpoint(g, 0)
    with pytest.raises(IndexError):
        insert_midpoint(g, 3)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(min_value=1, max_value=5), min_size=1, max_size=30))
def test_insertion_sequence_preserves_total_length(choices):
    g = uniform(3, 7.0)
    for c in choices:
        g = insert_midpoint(g, 1 + (c - 1) % g.num_intervals)
        assert np.all(np.diff(g.nodes) > 0)
        assert abs(g.tau.sum() - 7.0) <= 1e-12 * 7.0
