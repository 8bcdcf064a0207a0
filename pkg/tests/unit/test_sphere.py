"""
Unit tests for great-circle helpers
"""

import math

import numpy as np
import pytest

from app.core.exceptions import UndefinedBearingError
from app.geo.sphere import (
    EARTH_RADIUS_M,
    bearing_deg,
    distance_m,
    distance_to_segment_m,
    intermediate_point,
    intermediate_point_array,
    midpoint,
    sample_path,
)
from app.models.record import GeoPoint


def test_distance_one_degree_of_latitude():
    d = distance_m(GeoPoint(0.0, 0.0), GeoPoint(1.0, 0.0))
    assert d == pytest.approx(EARTH_RADIUS_M * math.pi / 180, rel=1e-9)


def test_distance_is_symmetric_and_zero_on_self():
    a, b = GeoPoint(57.1, 10.2), GeoPoint(57.9, 11.3)
    assert distance_m(a, b) == pytest.approx(distance_m(b, a))
    assert distance_m(a, a) == 0.0


@pytest.mark.parametrize(
    "target, expected",
    [
        (GeoPoint(1.0, 0.0), 0.0),
        (GeoPoint(0.0, 1.0), 90.0),
        (GeoPoint(-1.0, 0.0), 180.0),
        (GeoPoint(0.0, -1.0), 270.0),
    ],
)
def test_bearing_cardinal_directions(target, expected):
    assert bearing_deg(GeoPoint(0.0, 0.0), target) == pytest.approx(expected, abs=1e-9)


def test_bearing_identical_points_raises():
    p = GeoPoint(57.0, 10.0)
    with pytest.raises(UndefinedBearingError):
        bearing_deg(p, p)


def test_intermediate_point_endpoints_and_midpoint():
    a, b = GeoPoint(57.0, 10.0), GeoPoint(58.0, 11.0)
    assert intermediate_point(a, b, 0.0) == a
    assert intermediate_point(a, b, 1.0) == b
    mid = midpoint(a, b)
    assert distance_m(a, mid) == pytest.approx(distance_m(mid, b), rel=1e-9)


def test_intermediate_point_array_matches_scalar():
    a, b = GeoPoint(57.0, 10.0), GeoPoint(58.0, 11.0)
    lats, lons = intermediate_point_array([a.lat] * 3, [a.lon] * 3, [b.lat] * 3, [b.lon] * 3, [0.0, 0.3, 1.0])
    scalar = intermediate_point(a, b, 0.3)
    assert lats[0] == a.lat and lons[2] == b.lon
    assert lats[1] == pytest.approx(scalar.lat) and lons[1] == pytest.approx(scalar.lon)


def test_sample_path_step_and_endpoints():
    a, b = GeoPoint(57.0, 10.0), GeoPoint(57.0, 10.1)
    points = sample_path(a, b, 500.0)
    assert points[0] == a and points[-1] == b
    gaps = [distance_m(p, q) for p, q in zip(points, points[1:])]
    assert all(g <= 500.0 + 1e-6 for g in gaps)
    assert np.allclose(gaps[:-1], 500.0, atol=1e-3)


def test_sample_path_rejects_non_positive_step():
    with pytest.raises(ValueError):
        sample_path(GeoPoint(0.0, 0.0), GeoPoint(0.0, 1.0), 0.0)


def test_distance_to_segment():
    a, b = GeoPoint(0.0, 0.0), GeoPoint(0.0, 1.0)
    above = GeoPoint(0.01, 0.5)
    assert distance_to_segment_m(above, a, b) == pytest.approx(distance_m(GeoPoint(0.0, 0.5), above), rel=1e-4)
    beyond = GeoPoint(0.0, 1.5)
    assert distance_to_segment_m(beyond, a, b) == pytest.approx(distance_m(b, beyond))
