"""
Vessel counts, transit events, daily cycle and gridded activity maps
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Literal, Sequence

import numpy as np
import numpy.typing as npt

from app.core.exceptions import ConfigError
from app.core.logging import get_logger, measure_latency
from app.geo.grid import GridSpec, cell_index, cell_indices, mean_segment_lengths
from app.geo.sphere import bearing_deg_array, distance_m_array, sample_path_array
from app.ingest.areas import KIEL_CANAL, SKAGERRAK
from app.landmask.protocol import LandMaskProtocol
from app.models.journey import AbsentPeriod, Journey, StationaryPeriod
from app.models.trajectory import Trajectory
from app.models.vessel import SizeClass, VesselCategory, size_class
from app.schemas.metrics import AverageRow, CycleSummary, DailyCycleRow
from app.services.base import parallel_map
from app.services.trajectory import route_cumulative, speed_at_array, time_at_distance_array

logger = get_logger(__name__)

DAY_S = 86_400
ALL_SCOPE = "ALL"
UNKNOWN_AREA = "UNKNOWN"
# Joins the area and the vessel group of a transit-rate scope, e.g. "Skagerrak/Cargo".
SCOPE_SEPARATOR = "/"
# Speeds below this (m/s) make the chord-length duration meaningless.
MIN_CROSSING_SPEED_MS = 1e-3

IntArray = npt.NDArray[np.int64]
FloatArray = npt.NDArray[np.float64]
GroupKey = tuple[VesselCategory, SizeClass, int]
EventKey = tuple[VesselCategory, SizeClass, int, str]
State = Literal["moving", "stationary"]
EventKind = Literal["entries", "exits"]

_STATIONARY, _MOVING = 1, 2


@dataclass
class CountTimeline:
    """
    Per-bin vessel counts and transit events

    Series are keyed by (category, size class, UTC offset); events add the
    transit area. Bin k covers [start + k*bin_s, start + (k+1)*bin_s).
    """

    start: int
    end: int
    bin_s: int
    moving: dict[GroupKey, IntArray] = field(default_factory=dict)
    stationary: dict[GroupKey, IntArray] = field(default_factory=dict)
    entries: dict[EventKey, IntArray] = field(default_factory=dict)
    exits: dict[EventKey, IntArray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.end <= self.start:
            raise ConfigError("analysis period must have a positive length")

    @property
    def n_bins(self) -> int:
        return math.ceil((self.end - self.start) / self.bin_s)

    @property
    def days(self) -> float:
        return (self.end - self.start) / DAY_S

    def bin_starts(self) -> IntArray:
        return self.start + np.arange(self.n_bins, dtype=np.int64) * self.bin_s

    def bin_span(self, t0: float, t1: float) -> tuple[int, int] | None:
        """First and last bin overlapped by [t0, t1], clipped to the timeline."""
        lo = math.floor((t0 - self.start) / self.bin_s)
        hi = lo if t1 == t0 else math.ceil((t1 - self.start) / self.bin_s) - 1
        lo, hi = max(lo, 0), min(hi, self.n_bins - 1)
        return (lo, hi) if lo <= hi else None

    def bin_of(self, t: float) -> int | None:
        if not self.start <= t <= self.end:
            return None
        return min(math.floor((t - self.start) / self.bin_s), self.n_bins - 1)

    def groups(self) -> list[tuple[VesselCategory, SizeClass]]:
        keys = {(category, size) for category, size, _ in self.moving}
        return sorted(keys, key=lambda k: (k[0].value, k[1].value))

    def areas(self) -> list[str]:
        return sorted({key[3] for key in (*self.entries, *self.exits)})

    def state(
        self,
        name: State,
        *,
        category: VesselCategory | None = None,
        size: SizeClass | None = None,
        offset: int | None = None,
    ) -> IntArray:
        series = self.moving if name == "moving" else self.stationary
        return self._sum(series, lambda k: _matches(k, category, size, offset))

    def events(
        self,
        kind: EventKind,
        *,
        area: str | None = None,
        category: VesselCategory | None = None,
        size: SizeClass | None = None,
        offset: int | None = None,
    ) -> IntArray:
        series = self.entries if kind == "entries" else self.exits
        return self._sum(
            series,
            lambda k: _matches(k, category, size, offset) and (area is None or k[3] == area),
        )

    def _sum(self, series: dict, predicate) -> IntArray:
        total = np.zeros(self.n_bins, dtype=np.int64)
        for key, values in series.items():
            if predicate(key):
                total += values
        return total

    def merge(self, other: CountTimeline) -> CountTimeline:
        if (self.start, self.end, self.bin_s) != (other.start, other.end, other.bin_s):
            raise ConfigError("cannot merge timelines over different periods")
        merged = CountTimeline(self.start, self.end, self.bin_s)
        for name in ("moving", "stationary", "entries", "exits"):
            target: dict = getattr(merged, name)
            for source in (getattr(self, name), getattr(other, name)):
                for key, values in source.items():
                    target[key] = target.get(key, 0) + values
        return merged


def _matches(
    key: tuple, category: VesselCategory | None, size: SizeClass | None, offset: int | None
) -> bool:
    return (
        (category is None or key[0] is category)
        and (size is None or key[1] is size)
        and (offset is None or key[2] == offset)
    )


def _journey_states(journey: Journey, timeline: CountTimeline) -> npt.NDArray[np.int8]:
    states = np.zeros(timeline.n_bins, dtype=np.int8)
    for leg in journey.legs:
        if isinstance(leg, AbsentPeriod):
            continue
        span = timeline.bin_span(leg.start_time, leg.end_time)
        if span is None:
            continue
        value = _MOVING if isinstance(leg, Trajectory) else _STATIONARY
        lo, hi = span
        np.maximum(states[lo : hi + 1], value, out=states[lo : hi + 1])
    return states


def _journey_events(journey: Journey) -> list[tuple[EventKind, int, str]]:
    """Transit events: mid-journey absences always count, edge absences only with an area."""
    events: list[tuple[EventKind, int, str]] = []
    if journey.edge_entry is not None and journey.edge_entry.entry_area:
        events.append(("entries", journey.edge_entry.end_time, journey.edge_entry.entry_area))
    for period in journey.absent_periods:
        exit_area = period.exit_area or period.entry_area or UNKNOWN_AREA
        entry_area = period.entry_area or period.exit_area or UNKNOWN_AREA
        events.append(("exits", period.start_time, exit_area))
        events.append(("entries", period.end_time, entry_area))
    if journey.edge_exit is not None and journey.edge_exit.exit_area:
        events.append(("exits", journey.edge_exit.start_time, journey.edge_exit.exit_area))
    return events


@measure_latency("count_timeline")
def count_timeline(
    journeys: Iterable[Journey],
    start: int,
    end: int,
    bin_s: int = 240,
    size_boundary: float = 10_000.0,
) -> CountTimeline:
    """
    Moving/stationary vessel counts and transit events per bin

    Moving wins when a vessel is both moving and stationary within one bin.
    """
    timeline = CountTimeline(start, end, bin_s)
    n = timeline.n_bins
    for journey in journeys:
        group: GroupKey = (
            journey.category,
            size_class(journey.gross_tonnage, size_boundary),
            journey.utc_offset or 0,
        )
        states = _journey_states(journey, timeline)
        moving = timeline.moving.setdefault(group, np.zeros(n, dtype=np.int64))
        stationary = timeline.stationary.setdefault(group, np.zeros(n, dtype=np.int64))
        moving += states == _MOVING
        stationary += states == _STATIONARY
        for kind, time, area in _journey_events(journey):
            k = timeline.bin_of(time)
            if k is None:
                continue
            series = timeline.entries if kind == "entries" else timeline.exits
            series.setdefault((*group, area), np.zeros(n, dtype=np.int64))[k] += 1
    return timeline


def _daily_spread(series: npt.ArrayLike, bin_s: int, how: Literal["mean", "sum"]) -> float:
    values = np.asarray(series, dtype=np.float64)
    if values.size == 0:
        return 0.0
    day = (np.arange(values.size) * bin_s) // DAY_S
    sums = np.bincount(day, weights=values)
    if how == "mean":
        sums = sums / np.bincount(day)
    return float(np.std(sums)) if sums.size > 1 else 0.0


def average_counts(timeline: CountTimeline, stationary_window_days: float = 21.0) -> list[AverageRow]:
    """
    Mean counts per scope (all vessels, categories, size classes) and transit
    rates per area, overall and per category and size class

    Raises:
        ConfigError: the central window is longer than the analysis period
    """
    n = timeline.n_bins
    window_bins = int(round(stationary_window_days * DAY_S / timeline.bin_s))
    if window_bins > n:
        raise ConfigError(
            f"stationary window of {stationary_window_days} d exceeds the "
            f"{timeline.days:.3f} d analysis period"
        )
    if not timeline.moving:
        return []
    first = (n - window_bins) // 2
    central = slice(first, first + window_bins)
    full_days = n * timeline.bin_s / DAY_S
    central_days = window_bins * timeline.bin_s / DAY_S

    scopes: list[tuple[str, dict]] = [(ALL_SCOPE, {})]
    scopes += [(category.value, {"category": category}) for category in VesselCategory]
    scopes += [(size.value, {"size": size}) for size in SizeClass]

    rows: list[AverageRow] = []
    for scope, selector in scopes:
        moving = timeline.state("moving", **selector)
        stationary = timeline.state("stationary", **selector)[central]
        total = moving[central] + stationary
        rows.append(_average("moving", scope, "full", full_days, moving, timeline.bin_s))
        rows.append(
            _average("stationary", scope, "central", central_days, stationary, timeline.bin_s)
        )
        rows.append(_average("total", scope, "central", central_days, total, timeline.bin_s))

    areas = [ALL_SCOPE, *sorted({SKAGERRAK, KIEL_CANAL, *timeline.areas()})]
    groups: list[tuple[str | None, dict]] = [(None, {})]
    groups += [(category.value, {"category": category}) for category in VesselCategory]
    groups += [(size.value, {"size": size}) for size in SizeClass]
    for area in areas:
        for group, selector in groups:
            if area != ALL_SCOPE:
                selector = {**selector, "area": area}
            events = timeline.events("entries", **selector) + timeline.events("exits", **selector)
            rows.append(
                AverageRow(
                    quantity="transits_per_day",
                    scope=rate_scope(area, group),
                    window="full",
                    window_days=full_days,
                    mean=float(events.sum()) / timeline.days,
                    stat=_daily_spread(events, timeline.bin_s, "sum"),
                )
            )
    return rows


def rate_scope(area: str, group: str | None = None) -> str:
    """Scope label of a transit rate: the area, narrowed to one category or size class."""
    return area if group is None else f"{area}{SCOPE_SEPARATOR}{group}"


def split_rate_scope(scope: str) -> tuple[str, str]:
    """(area, group) of a transit-rate scope; the group is ALL when not narrowed."""
    area, _, group = scope.partition(SCOPE_SEPARATOR)
    return area, group or ALL_SCOPE


def _average(
    quantity: Literal["moving", "stationary", "total"],
    scope: str,
    window: Literal["full", "central"],
    days: float,
    series: IntArray,
    bin_s: int,
) -> AverageRow:
    return AverageRow(
        quantity=quantity,
        scope=scope,
        window=window,
        window_days=days,
        mean=float(series.mean()) if series.size else 0.0,
        stat=_daily_spread(series, bin_s, "mean"),
    )


def daily_cycle(timeline: CountTimeline) -> tuple[list[DailyCycleRow], list[CycleSummary]]:
    """
    Counts and transit events folded onto the local time of day

    Each series is shifted by its vessels' UTC offset before folding.
    """
    tod_bins = math.ceil(DAY_S / timeline.bin_s)
    starts = timeline.bin_starts()
    offsets = sorted({key[2] for key in (*timeline.moving, *timeline.entries, *timeline.exits)})
    folded = {
        name: np.zeros(tod_bins, dtype=np.int64)
        for name in ("moving", "stationary", "entries", "exits")
    }
    for offset in offsets:
        local = ((starts + offset * 3600) % DAY_S) // timeline.bin_s
        for name in ("moving", "stationary"):
            series = timeline.state(name, offset=offset)
            folded[name] += np.bincount(local, weights=series, minlength=tod_bins).astype(np.int64)
        for name in ("entries", "exits"):
            series = timeline.events(name, offset=offset)
            folded[name] += np.bincount(local, weights=series, minlength=tod_bins).astype(np.int64)

    rows = [
        DailyCycleRow(
            tod_bin=k,
            tod_start_h=k * timeline.bin_s / 3600,
            moving=int(folded["moving"][k]),
            stationary=int(folded["stationary"][k]),
            entries=int(folded["entries"][k]),
            exits=int(folded["exits"][k]),
        )
        for k in range(tod_bins)
    ]
    summaries = [_circular_summary(name, values, timeline.bin_s) for name, values in folded.items()]
    return rows, summaries


def _circular_summary(name: str, counts: IntArray, bin_s: int) -> CycleSummary:
    total = int(counts.sum())
    if total == 0:
        return CycleSummary(series=name, total=0)
    centers_h = (np.arange(counts.size) + 0.5) * bin_s / 3600
    angles = 2 * np.pi * centers_h / 24
    c = float(np.sum(counts * np.cos(angles))) / total
    s = float(np.sum(counts * np.sin(angles))) / total
    resultant = math.hypot(c, s)
    mean_h = (math.atan2(s, c) % (2 * math.pi)) * 24 / (2 * math.pi) if resultant > 0 else None
    std_h = (
        math.sqrt(-2 * math.log(resultant)) * 24 / (2 * math.pi) if resultant > 0 else None
    )
    return CycleSummary(
        series=name,
        total=total,
        mode_h=float(centers_h[int(np.argmax(counts))]),
        circular_mean_h=mean_h,
        circular_std_h=std_h,
    )


@dataclass
class GridContribution:
    """Crossings of one trajectory: one entry per cell crossing."""

    rows: IntArray
    cols: IntArray
    duration: FloatArray
    speed: FloatArray
    bearing_deg: FloatArray
    excluded_tracklets: int = 0
    excluded_time_s: float = 0.0

    @classmethod
    def empty(cls) -> GridContribution:
        return cls(
            np.zeros(0, dtype=np.int64),
            np.zeros(0, dtype=np.int64),
            np.zeros(0),
            np.zeros(0),
            np.zeros(0),
        )


@dataclass
class ActivityGrid:
    """Per-cell accumulators; merging is a cell-wise sum."""

    grid: GridSpec
    crossing_count: IntArray
    crossing_duration: FloatArray
    speed_sum: FloatArray
    bearing_sin: FloatArray
    bearing_cos: FloatArray
    mooring_duration: FloatArray
    excluded_tracklets: int = 0
    excluded_time_s: float = 0.0
    stationary_outside: int = 0
    stationary_unresolved: int = 0

    @classmethod
    def empty(cls, grid: GridSpec) -> ActivityGrid:
        shape = grid.shape
        return cls(
            grid=grid,
            crossing_count=np.zeros(shape, dtype=np.int64),
            crossing_duration=np.zeros(shape),
            speed_sum=np.zeros(shape),
            bearing_sin=np.zeros(shape),
            bearing_cos=np.zeros(shape),
            mooring_duration=np.zeros(shape),
        )

    def add(self, contribution: GridContribution) -> None:
        idx = (contribution.rows, contribution.cols)
        rad = np.radians(contribution.bearing_deg)
        np.add.at(self.crossing_count, idx, 1)
        np.add.at(self.crossing_duration, idx, contribution.duration)
        np.add.at(self.speed_sum, idx, contribution.speed)
        np.add.at(self.bearing_sin, idx, np.sin(rad))
        np.add.at(self.bearing_cos, idx, np.cos(rad))
        self.excluded_tracklets += contribution.excluded_tracklets
        self.excluded_time_s += contribution.excluded_time_s

    def add_stationary(self, period: StationaryPeriod) -> bool:
        """Add a resolved period's duration to its idle cell; False when nothing was added."""
        cell = rasterize_stationary(period, self.grid)
        if cell is None:
            if period.position_resolved:
                self.stationary_outside += 1
            else:
                self.stationary_unresolved += 1
            return False
        self.mooring_duration[cell] += period.duration
        return True

    def merge(self, other: ActivityGrid) -> ActivityGrid:
        if other.grid != self.grid:
            raise ConfigError("cannot merge activity grids over different layouts")
        return ActivityGrid(
            grid=self.grid,
            crossing_count=self.crossing_count + other.crossing_count,
            crossing_duration=self.crossing_duration + other.crossing_duration,
            speed_sum=self.speed_sum + other.speed_sum,
            bearing_sin=self.bearing_sin + other.bearing_sin,
            bearing_cos=self.bearing_cos + other.bearing_cos,
            mooring_duration=self.mooring_duration + other.mooring_duration,
            excluded_tracklets=self.excluded_tracklets + other.excluded_tracklets,
            excluded_time_s=self.excluded_time_s + other.excluded_time_s,
            stationary_outside=self.stationary_outside + other.stationary_outside,
            stationary_unresolved=self.stationary_unresolved + other.stationary_unresolved,
        )

    def mean_speed(self) -> FloatArray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self.crossing_count > 0, self.speed_sum / self.crossing_count, np.nan)

    def mean_bearing(self) -> FloatArray:
        bearing = np.degrees(np.arctan2(self.bearing_sin, self.bearing_cos)) % 360.0
        return np.where(self.crossing_count > 0, bearing, np.nan)


def _samples(
    traj: Trajectory, mask: LandMaskProtocol | None, step_m: float
) -> tuple[FloatArray, FloatArray, FloatArray, IntArray, int, float]:
    """
    Route samples with along-route distance and chain id

    Chains break at tracklets over land, which are left out.
    """
    cum = route_cumulative(traj.route)
    waypoints = traj.route.waypoints
    lats: list[FloatArray] = []
    lons: list[FloatArray] = []
    dists: list[FloatArray] = []
    chains: list[IntArray] = []
    chain = -1
    joined = False
    excluded = 0
    excluded_time = 0.0
    for j, (a, b) in enumerate(zip(waypoints, waypoints[1:])):
        if mask is not None and mask.crosses_land(a, b, step_m):
            t_a, t_b = time_at_distance_array(traj, [cum[j], cum[j + 1]])
            excluded += 1
            excluded_time += float(t_b - t_a)
            joined = False
            continue
        seg_lats, seg_lons = sample_path_array(a, b, step_m)
        offsets = np.minimum(
            distance_m_array(a.lat, a.lon, seg_lats, seg_lons), cum[j + 1] - cum[j]
        )
        if joined:
            seg_lats, seg_lons, offsets = seg_lats[1:], seg_lons[1:], offsets[1:]
        else:
            chain += 1
        lats.append(seg_lats)
        lons.append(seg_lons)
        dists.append(cum[j] + offsets)
        chains.append(np.full(seg_lats.size, chain, dtype=np.int64))
        joined = True
    if not lats:
        empty = np.zeros(0)
        return empty, empty, empty, np.zeros(0, dtype=np.int64), excluded, excluded_time
    return (
        np.concatenate(lats),
        np.concatenate(lons),
        np.concatenate(dists),
        np.concatenate(chains),
        excluded,
        excluded_time,
    )


def rasterize_trajectory(
    traj: Trajectory,
    grid: GridSpec,
    mask: LandMaskProtocol | None = None,
    step_m: float = 100.0,
) -> GridContribution:
    """
    Cell crossings of a trajectory sampled every `step_m` meters

    Consecutive samples in one cell form a crossing. Its duration is the mean
    chord length at the crossing bearing over the mean speed; durations are
    then scaled to the time the trajectory spends inside the grid, tracklets
    over land excluded.
    """
    lats, lons, dists, chains, excluded, excluded_time = _samples(traj, mask, step_m)
    contribution = GridContribution.empty()
    contribution.excluded_tracklets = excluded
    contribution.excluded_time_s = excluded_time
    if lats.size == 0:
        return contribution

    times = time_at_distance_array(traj, dists)
    speeds = speed_at_array(traj, times)
    rows, cols, inside = cell_indices(lats, lons, grid)
    n = lats.size

    same_chain = chains[1:] == chains[:-1]
    step_bearing = bearing_deg_array(lats[:-1], lons[:-1], lats[1:], lons[1:])
    heading = np.zeros(n)
    heading[:-1] = np.where(same_chain, step_bearing, 0.0)
    # chain ends take the bearing of the step that reached them
    last_in_chain = np.append(~same_chain, True) & np.concatenate([[False], same_chain])
    heading[last_in_chain] = np.concatenate([[0.0], step_bearing])[last_in_chain]

    breaks = np.ones(n, dtype=bool)
    breaks[1:] = (~same_chain) | (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
    starts = np.flatnonzero(breaks)
    stops = np.append(starts[1:], n)
    keep = inside[starts]
    starts, stops = starts[keep], stops[keep]
    if starts.size == 0:
        return contribution

    rad = np.radians(heading)
    mean_speed, mean_sin, mean_cos = (
        _run_means(values, starts, stops) for values in (speeds, np.sin(rad), np.cos(rad))
    )
    bearing = np.degrees(np.arctan2(mean_sin, mean_cos)) % 360.0

    run_rows, run_cols = rows[starts], cols[starts]
    h = grid.cell_height_m
    w = grid.row_widths_m()[run_rows]
    chord = mean_segment_lengths(bearing, w / h, h)
    fallback = times[stops - 1] - times[starts]
    with np.errstate(divide="ignore", invalid="ignore"):
        duration = np.where(
            mean_speed > MIN_CROSSING_SPEED_MS,
            chord / np.where(mean_speed > 0, mean_speed, 1.0),
            fallback,
        )

    if traj.route_length == 0.0:
        target = float(traj.duration) if inside[0] else 0.0
    else:
        weight = (inside[:-1].astype(np.float64) + inside[1:]) / 2
        target = float(np.sum(np.diff(times) * weight * same_chain))
    raw = float(duration.sum())
    if raw > 0:
        duration = duration * (target / raw)
    else:
        duration = np.full(duration.size, target / duration.size)

    return GridContribution(
        rows=run_rows,
        cols=run_cols,
        duration=duration,
        speed=mean_speed,
        bearing_deg=bearing,
        excluded_tracklets=excluded,
        excluded_time_s=excluded_time,
    )


def _run_means(values: FloatArray, starts: IntArray, stops: IntArray) -> FloatArray:
    cumulative = np.concatenate([[0.0], np.cumsum(values)])
    return (cumulative[stops] - cumulative[starts]) / (stops - starts)


def rasterize_stationary(period: StationaryPeriod, grid: GridSpec) -> tuple[int, int] | None:
    """Cell receiving the period's mooring time, or None when unresolved or outside the grid."""
    if not period.position_resolved or not grid.contains(period.idle_pos):
        return None
    return cell_index(period.idle_pos, grid)


@measure_latency("activity_grid")
def build_activity_grid(
    journeys: Sequence[Journey],
    grid: GridSpec,
    mask: LandMaskProtocol | None = None,
    step_m: float = 100.0,
    threads: int = 1,
) -> ActivityGrid:
    """Rasterize every trajectory and resolved stationary period; accumulation order is fixed."""
    activity = ActivityGrid.empty(grid)
    trajectories = [traj for journey in journeys for traj in journey.trajectories]
    contributions = parallel_map(
        lambda traj: rasterize_trajectory(traj, grid, mask, step_m), trajectories, threads
    )
    for contribution in contributions:
        activity.add(contribution)
    for journey in journeys:
        for period in journey.stationary_periods:
            activity.add_stationary(period)
    logger.info(
        "activity_grid_built",
        trajectories=len(trajectories),
        crossings=int(activity.crossing_count.sum()),
        excluded_tracklets=activity.excluded_tracklets,
        stationary_outside=activity.stationary_outside,
        stationary_unresolved=activity.stationary_unresolved,
    )
    return activity


def density_map(activity: ActivityGrid, period_s: float, stationary_only: bool = False) -> FloatArray:
    """Mean vessels per km2: accumulated vessel time over period length and cell area."""
    seconds = activity.mooring_duration
    if not stationary_only:
        seconds = seconds + activity.crossing_duration
    return seconds / period_s / activity.grid.row_areas_km2()[:, None]


def activity_layers(activity: ActivityGrid, period_s: float) -> dict[str, FloatArray]:
    """Raster layers in output order."""
    return {
        "density_all": density_map(activity, period_s),
        "density_stationary": density_map(activity, period_s, stationary_only=True),
        "crossings_per_day": activity.crossing_count / (period_s / DAY_S),
        "mean_speed": activity.mean_speed(),
        "mean_bearing": activity.mean_bearing(),
    }
