import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from gausssieve import oracles
from gausssieve.geometry import count_at, cover_candidates, cover_sweep, max_disk_cover

coords = st.floats(-5, 5, allow_nan=False, allow_infinity=False)
point_lists = st.lists(st.tuples(coords, coords), min_size=1, max_size=25)


def test_trivial_cases():
    assert max_disk_cover([], 1.0).count == 0
    assert max_disk_cover([(0.3, 0.4)], 0.0).count == 1
    assert max_disk_cover([(0, 0), (2, 0)], 1.0).count == 2  # boundary of a closed disk
    assert max_disk_cover([(0, 0), (2.001, 0)], 1.0).count == 1
    assert max_disk_cover([(1, 1)] * 3, 0.5).count == 3


@given(point_lists, st.floats(0.05, 3.0))
@settings(max_examples=80, deadline=None)
def test_sweep_equals_candidates(pts, u):
    a = cover_sweep(pts, u)
    b = cover_candidates(pts, u)
    assert a.count == b.count
    # the reported centre really achieves the count
    assert count_at(pts, a.center, u) >= a.count


@given(point_lists, st.floats(0.05, 3.0), st.floats(0.0, 6.0))
@settings(max_examples=80, deadline=None)
def test_bounded_sweep_equals_candidates(pts, u, B):
    a = cover_sweep(pts, u, B)
    b = cover_candidates(pts, u, B)
    assert a.count == b.count
    assert math.hypot(*a.center) <= B * (1 + 1e-9) + 1e-12
    assert count_at(pts, a.center, u) >= a.count


@given(point_lists, st.floats(0.2, 2.0))
@settings(max_examples=30, deadline=None)
def test_grid_sandwich(pts, u):
    exact = max_disk_cover(pts, u).count
    h = u / 20
    assert oracles.grid_cover(pts, u, h) <= exact <= oracles.grid_cover(pts, u + h / math.sqrt(2), h)


@given(point_lists, st.floats(0.05, 2.0), st.floats(0.0, 2.0))
@settings(max_examples=40, deadline=None)
def test_monotone_in_radius(pts, u, du):
    assert max_disk_cover(pts, u).count <= max_disk_cover(pts, u + du).count


def test_label_dedup():
    pts = np.array([(0.0, 0.0), (0.5, 0.0), (0.25, 0.0)])
    labels = np.array([0, 0, 1])
    assert cover_candidates(pts, 0.3, labels=labels).count == 2
    assert cover_candidates(pts, 0.3).count == 3
