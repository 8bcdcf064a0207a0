"""
Unit tests for message cleansing and movement segmentation
"""

import numpy as np
import pytest

from app.core.config import CleanseThresholds
from app.geo.sphere import KNOT_MS
from app.ingest.areas import transit_areas
from app.services.cleanse import (
    area_filter_movements,
    cleanse_vessel,
    combine_movements,
    correct_static_positions,
    fits_square,
    pair_speed_ms,
    remove_duplicates,
    remove_outliers,
    remove_static_vessels,
    run_cleanse,
    segment_movements,
)
from tests.factories import eastbound, lon_step, pos, static

AREAS = transit_areas()


def test_fits_square():
    assert fits_square([pos(1, 0, 57.0, 10.0), pos(1, 60, 57.001, 10.001)], 400.0)
    assert not fits_square([pos(1, 0, 57.0, 10.0), pos(1, 60, 57.01, 10.0)], 400.0)
    assert fits_square([], 400.0)


def test_remove_static_vessels():
    moored = [pos(1, 0, 57.0, 10.0), pos(1, 600, 57.0005, 10.0)]
    sailing = eastbound(2, 0, 5)
    kept, removed = remove_static_vessels({1: moored, 2: sailing})
    assert list(kept) == [2]
    assert removed == [1]


def test_static_report_moved_between_positions():
    records = [pos(1, 0, 57.0, 10.0), static(1, 50, 56.0, 9.0, 70), pos(1, 100, 57.0, 10.02)]
    corrected, count = correct_static_positions(records)
    assert count == 1
    assert corrected[1].pos.lat == pytest.approx(57.0, abs=1e-4)
    assert corrected[1].pos.lon == pytest.approx(10.01, abs=1e-6)


def test_static_report_outside_position_span_kept_as_is():
    records = [static(1, 0, 56.0, 9.0), pos(1, 10, 57.0, 10.0)]
    corrected, count = correct_static_positions(records)
    assert count == 0
    assert corrected[0].pos.lat == 56.0


def test_remove_duplicates():
    records = [pos(1, 0, 57.0, 10.0), pos(1, 2, 57.0, 10.0), pos(1, 60, 57.0, 10.005)]
    kept, dropped = remove_duplicates(records)
    assert [r.time for r in kept] == [0, 60]
    assert [r.time for r in dropped] == [2]


def test_low_speed_splits_movements_and_keeps_stationary_records():
    first = eastbound(1, 0, 6)
    end = first[-1]
    idle = [
        pos(1, end.time + 600, end.pos.lat, end.pos.lon),
        pos(1, end.time + 1200, end.pos.lat, end.pos.lon),
    ]
    second = eastbound(1, end.time + 1800, 6, lon0=end.pos.lon)
    result = segment_movements([*first, *idle, *second], AREAS)
    assert len(result.movements) == 2
    assert [r.time for r in result.stationary] == [r.time for r in idle]
    assert result.movements[1][0] is second[0]


def test_long_gap_isolates_singleton():
    records = [*eastbound(1, 0, 4), pos(1, 49 * 3600, 57.0, 10.5)]
    result = segment_movements(records, AREAS)
    assert len(result.movements) == 1
    assert result.singletons_removed == [records[-1]]


def test_transit_area_passage_cut_at_largest_time_step():
    lat = 57.2
    records = [
        pos(1, 0, lat, 9.2),
        pos(1, 600, lat, 9.1),
        pos(1, 1200, lat, 9.03),  # inside Skagerrak
        pos(1, 1200 + 3 * 3600, 58.2, 9.03),  # inside Skagerrak
        pos(1, 1800 + 3 * 3600, 58.2, 9.1),
        pos(1, 2400 + 3 * 3600, 58.2, 9.2),
    ]
    result = segment_movements(records, AREAS)
    assert [len(m) for m in result.movements] == [3, 3]
    assert result.movements[1][0] is records[3]


def test_run_entirely_inside_transit_area_removed():
    records = [pos(1, k * 60, 57.5 + k * 0.003, 9.01) for k in range(4)]
    result = segment_movements(records, AREAS)
    assert result.movements == []
    assert len(result.area_removed) == 4


def test_speed_outlier_removed():
    track = eastbound(1, 0, 10)
    spike = pos(1, track[4].time + 30, 57.05, track[4].pos.lon)
    movement = [*track[:5], spike, *track[5:]]
    result = remove_outliers([movement])
    assert result.speed == [spike]
    assert len(result.movements[0]) == 10
    assert result.acceleration == []


def test_acceleration_spike_removes_lagging_record():
    """Record 5 lags 80 m behind its slot on a 10 m/s track: |a| is 1.6 there, 0.8 beside it."""
    track = eastbound(3, 0, 11, step_s=10, step_m=100.0)
    lagging = pos(3, 50, 57.0, 10.0 + lon_step(420.0, 57.0))
    track[5] = lagging
    result = remove_outliers([track])
    assert result.speed == []
    assert result.acceleration == [lagging]
    assert result.movements == [[r for r in track if r is not lagging]]


def test_outlier_removal_dropping_to_one_record_counts_isolated():
    a = pos(1, 0, 57.0, 10.0)
    b = pos(1, 10, 57.5, 10.0)
    result = remove_outliers([[a, b]])
    assert result.movements == []
    assert result.speed == [b]
    assert result.isolated == [a]


def test_area_filter_reclassifies_small_movements():
    small = [pos(1, 0, 57.0, 10.0), pos(1, 60, 57.0, 10.001)]
    big = eastbound(1, 1000, 5)
    kept, reclassified = area_filter_movements([small, big])
    assert kept == [big]
    assert reclassified == small


def test_combine_movements():
    a = eastbound(1, 0, 3)
    b = eastbound(1, a[-1].time + 60, 3, lon0=a[-1].pos.lon + 0.01)
    merged, merges, dropped = combine_movements([a, b], gap_s=120)
    assert merges == 1
    assert dropped == [b[0]]
    assert len(merged) == 1 and len(merged[0]) == 5

    kept, merges, dropped = combine_movements([a, b], gap_s=120, is_absent=lambda p, n: True)
    assert merges == 0 and len(kept) == 2 and dropped == []


def test_cleanse_vessel_conserves_records():
    track = eastbound(7, 0, 20)
    spike = pos(7, track[9].time + 30, 57.2, track[9].pos.lon)
    duplicate = pos(7, track[3].time + 1, track[3].pos.lat, track[3].pos.lon)
    typed = static(7, track[5].time + 30, 57.0, 10.0, vessel_type=70, destination="GDANSK")
    records = sorted([*track, spike, duplicate, typed], key=lambda r: r.time)

    result = cleanse_vessel(7, records, AREAS, CleanseThresholds())
    report = result.report
    assert report.is_conserved()
    assert report.outliers_speed == 1
    assert report.duplicates_removed == 1
    assert result.type_codes == (70,)
    assert result.destinations == ((typed.time, "GDANSK"),)
    assert len(result.movements) == 1
    assert spike in result.rejected and duplicate in result.rejected


def test_run_cleanse_drops_static_vessels_and_merges_reports():
    per_vessel = {
        2: eastbound(2, 0, 10),
        1: [pos(1, 0, 57.5, 10.5), pos(1, 3600, 57.5, 10.5)],
    }
    result = run_cleanse(per_vessel, AREAS, threads=2)
    assert list(result.vessels) == [2]
    assert result.report.input_records == 12
    assert result.report.static_vessels_removed == 1
    assert result.report.is_conserved()


def _noisy_track(seed, n=40):
    """Eastbound at ~6 m/s with metre-scale jitter and a few kilometre jumps."""
    rng = np.random.default_rng(seed)
    times = np.cumsum(rng.integers(5, 61, size=n))
    along = 6.0 * times + rng.normal(0.0, 40.0, size=n)
    jumps = rng.choice(n, size=3, replace=False)
    along[jumps] += rng.choice([-2000.0, 2000.0], size=3)
    across = rng.normal(0.0, 40.0, size=n)
    return [
        pos(4, int(t), 57.0 + y / 111_195.0, 10.0 + lon_step(x, 57.0))
        for t, x, y in zip(times, along, across)
    ]


def _accelerations(records):
    speeds = [pair_speed_ms(a, b) for a, b in zip(records, records[1:])]
    return [
        (speeds[i] - speeds[i - 1]) / ((records[i + 1].time - records[i - 1].time) / 2)
        for i in range(1, len(records) - 1)
    ]


@pytest.mark.parametrize("seed", range(12))
def test_outlier_removal_leaves_only_plausible_motion(seed):
    t = CleanseThresholds()
    result = remove_outliers([_noisy_track(seed)], t)
    for movement in result.movements:
        assert all(
            pair_speed_ms(a, b) <= t.max_speed_kn * KNOT_MS for a, b in zip(movement, movement[1:])
        )
        assert all(abs(a) <= t.max_accel_ms2 + 1e-9 for a in _accelerations(movement))


@pytest.mark.parametrize("seed", range(12))
def test_outlier_removal_is_a_fixpoint(seed):
    first = remove_outliers([_noisy_track(seed)])
    again = remove_outliers(first.movements)
    assert again.rejected == []
    assert again.movements == first.movements
