"""
Unit tests for vessel counts, averages, the daily cycle and activity maps
"""

import numpy as np
import pytest

from app.core.exceptions import ConfigError
from app.geo.grid import GridSpec
from app.geo.sphere import distance_m
from app.ingest.areas import SKAGERRAK
from app.models.journey import AbsentPeriod, Journey, StationaryPeriod
from app.models.record import GeoPoint
from app.models.trajectory import Route, SpeedPoint, Trajectory
from app.models.vessel import SizeClass, VesselCategory
from app.services.metrics import (
    DAY_S,
    ActivityGrid,
    CountTimeline,
    activity_layers,
    average_counts,
    build_activity_grid,
    count_timeline,
    daily_cycle,
    density_map,
    rasterize_trajectory,
    rate_scope,
)
from tests.factories import straight_trajectory

HOME = GeoPoint(57.3, 10.3)
AWAY = GeoPoint(57.3, 10.4)


def _moored(mmsi, start, end, p=HOME, resolved=True):
    return StationaryPeriod(mmsi, start, end, p, resolved)


@pytest.fixture
def ferry():
    """Moves 0-1 h, moored until 2h03m20s, moves again until 2h05m."""
    legs = (
        straight_trajectory(1, HOME, AWAY, 0, 3600),
        _moored(1, 3600, 7300, AWAY),
        straight_trajectory(1, AWAY, HOME, 7300, 7500),
    )
    return Journey(1, VesselCategory.PASSENGER_HIGH_SPEED, legs, utc_offset=1)


@pytest.fixture
def tanker():
    """Leaves through the Skagerrak and comes back; enters at the window edge."""
    legs = (
        straight_trajectory(2, GeoPoint(57.5, 9.3), GeoPoint(57.5, 9.03), 1000, 2000),
        AbsentPeriod(2, 2000, 30_000, exit_area=SKAGERRAK, entry_area=SKAGERRAK),
        straight_trajectory(2, GeoPoint(57.5, 9.03), GeoPoint(57.5, 9.3), 30_000, 31_000),
    )
    return Journey(
        2,
        VesselCategory.TANKER,
        legs,
        gross_tonnage=25_000.0,
        edge_entry=AbsentPeriod(2, 0, 1000, entry_area="Limfjord"),
        edge_exit=AbsentPeriod(2, 31_000, 2 * DAY_S),
        utc_offset=1,
    )


def test_moving_wins_shared_bins(ferry):
    timeline = count_timeline([ferry], 0, 2 * DAY_S, 240)
    moving = timeline.state("moving")
    stationary = timeline.state("stationary")
    assert moving.sum() == 17
    assert stationary.sum() == 15
    assert moving[30] == 1 and stationary[30] == 0
    assert np.all(moving + stationary <= 1)


def test_timeline_groups_by_category_size_and_offset(ferry, tanker):
    timeline = count_timeline([ferry, tanker], 0, 2 * DAY_S, 240)
    tanker_moving = timeline.state("moving", category=VesselCategory.TANKER)
    assert tanker_moving.sum() == timeline.state("moving", size=SizeClass.GE10K).sum()
    assert timeline.state("moving", offset=2).sum() == 0
    assert (VesselCategory.PASSENGER_HIGH_SPEED, SizeClass.UNKNOWN) in timeline.groups()


def test_transit_events(tanker):
    timeline = count_timeline([tanker], 0, 2 * DAY_S, 240)
    assert timeline.events("exits", area=SKAGERRAK).sum() == 1
    assert timeline.events("entries", area=SKAGERRAK).sum() == 1
    # edge entry with an area counts, edge exit without one does not
    assert timeline.events("entries", area="Limfjord").sum() == 1
    assert timeline.events("exits").sum() == 1
    assert timeline.events("exits", area=SKAGERRAK)[2000 // 240] == 1


def test_bin_span_edges():
    timeline = CountTimeline(0, 2400, 240)
    assert timeline.n_bins == 10
    assert timeline.bin_span(0, 240) == (0, 0)
    assert timeline.bin_span(240, 240) == (1, 1)
    assert timeline.bin_span(-500, -100) is None
    assert timeline.bin_of(2400) == 9


def test_empty_period_rejected():
    with pytest.raises(ConfigError):
        CountTimeline(100, 100, 240)


def test_average_counts(ferry, tanker):
    timeline = count_timeline([ferry, tanker], 0, 2 * DAY_S, 240)
    rows = {(r.quantity, r.scope): r for r in average_counts(timeline, 1.0)}
    n_bins = 2 * DAY_S // 240
    moving_bins = timeline.state("moving").sum()
    assert rows[("moving", "ALL")].mean == pytest.approx(moving_bins / n_bins)
    assert rows[("moving", "ALL")].window_days == 2.0
    assert rows[("stationary", "ALL")].window == "central"
    assert rows[("stationary", "ALL")].window_days == 1.0
    assert rows[("transits_per_day", SKAGERRAK)].mean == pytest.approx(1.0)
    assert rows[("transits_per_day", "ALL")].mean == pytest.approx(1.5)
    assert ("moving", "Cargo") in rows
    assert rows[("moving", "Cargo")].mean == 0.0


def test_transit_rates_split_by_category_and_size(ferry, tanker):
    timeline = count_timeline([ferry, tanker], 0, 2 * DAY_S, 240)
    rows = average_counts(timeline, 1.0)
    rates = {r.scope: r.mean for r in rows if r.quantity == "transits_per_day"}
    assert rates[rate_scope("ALL", "Tanker")] == pytest.approx(1.5)
    assert rates[rate_scope(SKAGERRAK, "GE10k")] == pytest.approx(1.0)
    assert rates[rate_scope(SKAGERRAK, "Cargo")] == 0.0
    for area in ("ALL", SKAGERRAK, "Limfjord"):
        by_category = sum(rates[rate_scope(area, c.value)] for c in VesselCategory)
        by_size = sum(rates[rate_scope(area, s.value)] for s in SizeClass)
        assert by_category == pytest.approx(rates[area])
        assert by_size == pytest.approx(rates[area])


def test_average_counts_window_longer_than_period(ferry):
    timeline = count_timeline([ferry], 0, DAY_S, 240)
    with pytest.raises(ConfigError):
        average_counts(timeline, 2.0)


def test_average_counts_without_journeys():
    assert average_counts(count_timeline([], 0, DAY_S, 240), 1.0) == []


def test_daily_cycle_shifts_by_utc_offset():
    journey = Journey(
        3,
        VesselCategory.CARGO,
        (straight_trajectory(3, HOME, AWAY, 0, 3600),),
        utc_offset=2,
    )
    rows, summaries = daily_cycle(count_timeline([journey], 0, DAY_S, 240))
    assert len(rows) == 360
    moving = np.array([row.moving for row in rows])
    assert moving[30:45].tolist() == [1] * 15
    assert moving.sum() == 15
    summary = {s.series: s for s in summaries}["moving"]
    assert summary.total == 15
    assert summary.mode_h == pytest.approx(30.5 * 240 / 3600)
    assert summary.circular_mean_h == pytest.approx(2.5, abs=1e-6)
    assert summary.circular_std_h < 0.5
    assert {s.series: s for s in summaries}["entries"].circular_mean_h is None


@pytest.fixture
def grid():
    return GridSpec.from_arcsec(57.0, 58.0, 10.0, 11.0)


def test_rasterize_northbound_trajectory(grid):
    lon = 10.004
    traj = straight_trajectory(4, GeoPoint(57.0, lon), GeoPoint(57.048, lon), 0, 1000)
    contribution = rasterize_trajectory(traj, grid)
    assert contribution.rows.tolist() == list(range(12))
    assert set(contribution.cols.tolist()) == {0}
    assert contribution.duration.sum() == pytest.approx(1000.0, rel=1e-6)
    np.testing.assert_allclose(contribution.speed, traj.speed_points[0].speed, rtol=1e-6)
    assert np.all(np.minimum(contribution.bearing_deg, 360 - contribution.bearing_deg) < 1e-3)


def test_leaving_and_reentering_a_cell_counts_two_crossings(grid):
    home, north = GeoPoint(57.001, 10.004), GeoPoint(57.006, 10.004)
    leg = distance_m(home, north)
    speed = 2 * leg / 1000.0
    traj = Trajectory(
        mmsi=8,
        route=Route((home, north, home)),
        speed_points=(SpeedPoint(0.0, 0.0, speed), SpeedPoint(2 * leg, 1000.0, speed)),
        start_time=0,
        end_time=1000,
        route_length=2 * leg,
    )
    contribution = rasterize_trajectory(traj, grid)
    assert contribution.rows.tolist() == [0, 1, 0]
    assert contribution.cols.tolist() == [0, 0, 0]
    assert contribution.duration.sum() == pytest.approx(1000.0, rel=1e-6)

    activity = ActivityGrid.empty(grid)
    activity.add(contribution)
    assert activity.crossing_count[0, 0] == 2
    assert activity.crossing_count[1, 0] == 1


def test_rasterize_skips_tracklets_over_land(grid, island_mask):
    a, b, c = GeoPoint(57.1, 10.2), GeoPoint(57.3, 10.2), GeoPoint(57.5, 10.5)
    first, second = distance_m(a, b), distance_m(b, c)
    length = first + second
    speed = length / 1000.0
    traj = Trajectory(
        mmsi=5,
        route=Route((a, b, c)),
        speed_points=(SpeedPoint(0.0, 0.0, speed), SpeedPoint(length, 1000.0, speed)),
        start_time=0,
        end_time=1000,
        route_length=length,
    )
    contribution = rasterize_trajectory(traj, grid, island_mask)
    assert contribution.excluded_tracklets == 1
    assert contribution.excluded_time_s == pytest.approx(second / speed, rel=1e-3)
    assert contribution.duration.sum() == pytest.approx(first / speed, rel=1e-3)


def test_activity_grid_and_layers(grid, ferry):
    unresolved = Journey(
        6, VesselCategory.CARGO, (_moored(6, 0, 3600, resolved=False),)
    )
    outside = Journey(7, VesselCategory.CARGO, (_moored(7, 0, 3600, GeoPoint(56.0, 10.0)),))
    activity = build_activity_grid([ferry, unresolved, outside], grid, threads=2)
    assert activity.mooring_duration.sum() == 3700
    assert activity.stationary_unresolved == 1
    assert activity.stationary_outside == 1
    assert activity.crossing_duration.sum() == pytest.approx(3800.0, rel=1e-6)

    layers = activity_layers(activity, DAY_S)
    assert list(layers) == [
        "density_all",
        "density_stationary",
        "crossings_per_day",
        "mean_speed",
        "mean_bearing",
    ]
    vessel_seconds = layers["density_all"] * DAY_S * grid.row_areas_km2()[:, None]
    assert vessel_seconds.sum() == pytest.approx(7500.0, rel=1e-6)
    assert np.isnan(layers["mean_speed"][0, 0])


def test_activity_grids_merge_cellwise(grid, ferry):
    one = build_activity_grid([ferry], grid)
    both = one.merge(build_activity_grid([ferry], grid))
    np.testing.assert_array_equal(both.crossing_count, 2 * one.crossing_count)
    other = ActivityGrid.empty(GridSpec.from_arcsec(57.0, 58.0, 10.0, 12.0))
    with pytest.raises(ConfigError):
        one.merge(other)


def test_density_map_mooring_only(grid):
    activity = ActivityGrid.empty(grid)
    activity.add_stationary(_moored(1, 0, 3600))
    density = density_map(activity, 3600, stationary_only=True)
    row, col = np.unravel_index(np.argmax(density), density.shape)
    assert density[row, col] == pytest.approx(1.0 / grid.cell_area_km2(int(row)))
