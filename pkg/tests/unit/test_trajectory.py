"""
Unit tests for route simplification and the speed model
"""

import numpy as np
import pytest

from app.core.exceptions import OutOfRangeError
from app.models.journey import Movement
from app.services.trajectory import (
    _segment_distances,
    build_trajectory,
    path_distance_at_array,
    position_at,
    rdp,
    speed_at_array,
    time_at_distance_array,
    validate_model,
)
from app.geo.sphere import distance_m
from tests.factories import eastbound, lon_step, pos


def test_rdp_collinear_keeps_endpoints():
    points = np.column_stack([np.linspace(0, 1, 20), np.linspace(0, 2, 20)])
    assert list(rdp(points, 1e-9)) == [0, 19]


def test_rdp_keeps_corner():
    points = [(0, 0), (1, 0.01), (2, 0), (2, 1), (2, 2)]
    assert list(rdp(points, 0.1)) == [0, 2, 4]


def test_rdp_random_walk_within_tolerance():
    """Every dropped point lies within epsilon of the kept segment spanning it."""
    rng = np.random.default_rng(42)
    points = np.cumsum(rng.normal(size=(1000, 2)), axis=0)
    epsilon = 1.5
    kept = rdp(points, epsilon)
    assert kept[0] == 0 and kept[-1] == 999
    assert np.all(np.diff(kept) > 0)
    for a, b in zip(kept, kept[1:]):
        if b - a > 1:
            dists = _segment_distances(points[a + 1 : b], points[a], points[b])
            assert dists.max() <= epsilon


def _movement(records):
    return Movement(records[0].mmsi, tuple(records))


def test_constant_speed_movement():
    movement = _movement(eastbound(1, 1000, 21))
    traj = build_trajectory(movement)
    assert len(traj.route.waypoints) == 2
    assert traj.start_time == 1000 and traj.end_time == 2200
    assert traj.route_length == pytest.approx(6000.0, rel=1e-3)
    assert traj.speed_points[-1].time == 1200.0
    assert traj.speed_points[-1].path_distance == traj.route_length
    assert speed_at_array(traj, [1600])[0] == pytest.approx(5.0, rel=1e-2)
    middle = position_at(traj, 1600)
    assert distance_m(middle, movement.records[10].pos) < 5.0


def test_speed_change_is_modelled():
    lat = 57.0
    slow = [pos(1, k * 60, lat, 10.0 + k * lon_step(300.0, lat)) for k in range(11)]
    start = slow[-1].pos.lon
    fast = [pos(1, 600 + k * 60, lat, start + k * lon_step(600.0, lat)) for k in range(1, 11)]
    traj = build_trajectory(_movement([*slow, *fast]))
    assert len(traj.speed_points) > 2
    assert speed_at_array(traj, [0])[0] == pytest.approx(5.0, rel=0.15)
    assert speed_at_array(traj, [1200])[0] == pytest.approx(10.0, rel=0.15)
    times = [p.time for p in traj.speed_points]
    assert all(b > a for a, b in zip(times, times[1:]))


def test_path_distance_and_time_are_inverse():
    traj = build_trajectory(_movement(eastbound(1, 0, 30)))
    times = np.linspace(0, traj.end_time, 17)
    distances = path_distance_at_array(traj, times)
    assert np.all(np.diff(distances) >= 0)
    np.testing.assert_allclose(time_at_distance_array(traj, distances), times, atol=1e-6)


def test_position_outside_span_raises():
    traj = build_trajectory(_movement(eastbound(1, 100, 5)))
    with pytest.raises(OutOfRangeError):
        position_at(traj, 99)
    with pytest.raises(OutOfRangeError):
        position_at(traj, 341)


def test_model_accuracy_on_clean_track():
    records = eastbound(1, 0, 25)
    records = [pos(r.mmsi, r.time, r.pos.lat, r.pos.lon, sog=9.72) for r in records]
    movement = _movement(records)
    report, comparison = validate_model([movement], [build_trajectory(movement)])
    assert report.records == 25
    assert report.median_position_error_m < 5.0
    assert report.median_route_distance_m < 5.0
    assert report.median_time_offset_s < 2.0
    assert [row.bin_kmh for row in comparison] == [18]
    assert comparison[0].mean_inferred_kmh == pytest.approx(18.0, rel=1e-2)


def test_model_accuracy_empty():
    report, comparison = validate_model([], [])
    assert report.records == 0 and comparison == []
