"""
Trajectory modelling: route simplification, speed control points, validation
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
import numpy.typing as npt

from app.core.config import ModelThresholds
from app.core.exceptions import ConsistencyError, OutOfRangeError
from app.core.logging import get_logger, measure_latency
from app.geo.sphere import (
    distance_m,
    distance_m_array,
    distance_to_segment_m,
    intermediate_point_array,
)
from app.models.journey import Movement
from app.models.record import GeoPoint
from app.models.trajectory import Route, SpeedPoint, Trajectory
from app.schemas.report import ModelAccuracyReport

logger = get_logger(__name__)

METERS_PER_DEG_LAT = 111_120.0


def rdp_epsilon(d_tol: float, mean_lat: float) -> float:
    """RDP threshold in degrees for a metric tolerance at a mean latitude."""
    return 2.0 * d_tol / METERS_PER_DEG_LAT * math.cos(math.radians(mean_lat))


def _segment_distances(points: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Euclidean distances from points to the segment a-b."""
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return np.hypot(*(points - a).T)
    u = np.clip(((points - a) @ ab) / denom, 0.0, 1.0)
    nearest = a + u[:, None] * ab
    return np.hypot(*(points - nearest).T)


def rdp(points: npt.ArrayLike, epsilon: float) -> npt.NDArray[np.int64]:
    """
    Ramer-Douglas-Peucker on planar points

    Returns:
        Indices of the kept points, ascending; first and last are always kept
    """
    pts = np.asarray(points, dtype=np.float64)
    n = len(pts)
    if n <= 2:
        return np.arange(n)
    keep = np.zeros(n, dtype=bool)
    keep[0] = keep[-1] = True
    stack = [(0, n - 1)]
    while stack:
        start, end = stack.pop()
        if end - start < 2:
            continue
        dists = _segment_distances(pts[start + 1 : end], pts[start], pts[end])
        k = int(np.argmax(dists))
        if dists[k] > epsilon:
            split = start + 1 + k
            keep[split] = True
            stack.append((split, end))
            stack.append((start, split))
    return np.flatnonzero(keep)


def simplify_route(movement: Movement, d_tol: float = 100.0) -> Route:
    lats = np.array([r.pos.lat for r in movement.records])
    lons = np.array([r.pos.lon for r in movement.records])
    epsilon = rdp_epsilon(d_tol, float(lats.mean()))
    kept = rdp(np.column_stack([lons, lats]), epsilon)
    return Route(
        waypoints=tuple(movement.records[i].pos for i in kept),
        d_tol=d_tol,
        source_indices=tuple(int(i) for i in kept),
    )


@lru_cache(maxsize=4096)
def route_cumulative(route: Route) -> npt.NDArray[np.float64]:
    """Cumulative great-circle distance at each waypoint."""
    lats = np.array([p.lat for p in route.waypoints])
    lons = np.array([p.lon for p in route.waypoints])
    steps = distance_m_array(lats[:-1], lons[:-1], lats[1:], lons[1:])
    return np.concatenate([[0.0], np.cumsum(steps)])


def _project(p: GeoPoint, a: GeoPoint, b: GeoPoint) -> float:
    """Fraction along a-b of p's nearest point, in a local equirectangular frame."""
    scale = math.cos(math.radians((a.lat + b.lat) / 2))
    ax, ay = a.lon * scale, a.lat
    bx, by = b.lon * scale, b.lat
    px, py = p.lon * scale, p.lat
    dx, dy = bx - ax, by - ay
    denom = dx * dx + dy * dy
    if denom == 0.0:
        return 0.0
    return min(1.0, max(0.0, ((px - ax) * dx + (py - ay) * dy) / denom))


def project_records(movement: Movement, route: Route) -> npt.NDArray[np.float64]:
    """Along-route distance of every record, non-decreasing."""
    cum = route_cumulative(route)
    indices = route.source_indices or _infer_indices(movement, route)
    s = np.empty(len(movement.records))
    for j in range(len(route.waypoints) - 1):
        lo, hi = indices[j], indices[j + 1]
        a, b = route.waypoints[j], route.waypoints[j + 1]
        seg = cum[j + 1] - cum[j]
        for i in range(lo, hi + 1):
            s[i] = cum[j] + _project(movement.records[i].pos, a, b) * seg
    s[0], s[-1] = 0.0, cum[-1]
    return np.maximum.accumulate(s)


def _infer_indices(movement: Movement, route: Route) -> tuple[int, ...]:
    indices: list[int] = []
    cursor = 0
    for waypoint in route.waypoints:
        while movement.records[cursor].pos != waypoint:
            cursor += 1
        indices.append(cursor)
    return tuple(indices)


def build_speed_model(
    movement: Movement, route: Route, thresholds: ModelThresholds | None = None
) -> tuple[SpeedPoint, ...]:
    """
    Speed control points along the route

    Smoothed record speeds are emitted whenever they move by the change
    fraction away from the last emitted point; segment times follow from
    linear-in-time speed and are rescaled to the message span.
    """
    t = thresholds or ModelThresholds()
    records = movement.records
    duration = float(movement.end_time - movement.start_time)
    if duration <= 0:
        raise ConsistencyError(f"mmsi={movement.mmsi}: movement without duration")
    length = float(route_cumulative(route)[-1])
    if length == 0.0:
        return (SpeedPoint(0.0, 0.0, 0.0), SpeedPoint(0.0, duration, 0.0))

    s = project_records(movement, route)
    times = np.array([r.time - movement.start_time for r in records], dtype=np.float64)
    n = len(records)
    prev_idx = np.maximum(np.arange(n) - 1, 0)
    next_idx = np.minimum(np.arange(n) + 1, n - 1)
    span = times[next_idx] - times[prev_idx]
    with np.errstate(divide="ignore", invalid="ignore"):
        smoothed = np.where(span > 0, (s[next_idx] - s[prev_idx]) / np.where(span > 0, span, 1), 0.0)
    smoothed = np.maximum(smoothed, t.min_speed_ms)

    emitted = [0]
    for i in range(1, n - 1):
        reference = smoothed[emitted[-1]]
        if abs(smoothed[i] - reference) >= t.speed_change_fraction * reference:
            emitted.append(i)
    emitted.append(n - 1)

    points: list[tuple[float, float]] = []
    for i in emitted:
        if points and s[i] <= points[-1][0]:
            if i == n - 1:
                points[-1] = (float(s[i]), float(smoothed[i]))
            continue
        points.append((float(s[i]), float(smoothed[i])))
    if len(points) < 2:
        points = [(0.0, length / duration), (length, length / duration)]
    points[0] = (0.0, points[0][1])

    model_times = [0.0]
    for (s0, v0), (s1, v1) in zip(points, points[1:]):
        model_times.append(model_times[-1] + (s1 - s0) / ((v0 + v1) / 2))
    scale = duration / model_times[-1]
    speed_points = [
        SpeedPoint(distance, time * scale, speed / scale)
        for (distance, speed), time in zip(points, model_times)
    ]
    speed_points[-1] = SpeedPoint(length, duration, speed_points[-1].speed)
    return tuple(speed_points)


def build_trajectory(movement: Movement, thresholds: ModelThresholds | None = None) -> Trajectory:
    t = thresholds or ModelThresholds()
    route = simplify_route(movement, t.d_tol_m)
    return Trajectory(
        mmsi=movement.mmsi,
        route=route,
        speed_points=build_speed_model(movement, route, t),
        start_time=movement.start_time,
        end_time=movement.end_time,
        route_length=float(route_cumulative(route)[-1]),
    )


@measure_latency("trajectory")
def build_trajectories(
    movements: Sequence[Movement], thresholds: ModelThresholds | None = None
) -> list[Trajectory]:
    return [build_trajectory(movement, thresholds) for movement in movements]


@dataclass(frozen=True)
class _Kinematics:
    s: npt.NDArray[np.float64]
    t: npt.NDArray[np.float64]
    v: npt.NDArray[np.float64]


def _kinematics(traj: Trajectory) -> _Kinematics:
    return _Kinematics(
        s=np.array([p.path_distance for p in traj.speed_points]),
        t=np.array([p.time for p in traj.speed_points]),
        v=np.array([p.speed for p in traj.speed_points]),
    )


def _check_span(traj: Trajectory, times: npt.NDArray[np.float64]) -> None:
    if np.any(times < traj.start_time) or np.any(times > traj.end_time):
        raise OutOfRangeError(
            f"time outside trajectory span [{traj.start_time}, {traj.end_time}]"
        )


def path_distance_at_array(traj: Trajectory, times: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Along-route distance at absolute times (quadratic within each control interval)."""
    times = np.atleast_1d(np.asarray(times, dtype=np.float64))
    _check_span(traj, times)
    k = _kinematics(traj)
    tau_abs = times - traj.start_time
    seg = np.clip(np.searchsorted(k.t, tau_abs, side="right") - 1, 0, len(k.t) - 2)
    dt = k.t[seg + 1] - k.t[seg]
    tau = tau_abs - k.t[seg]
    accel = (k.v[seg + 1] - k.v[seg]) / dt
    s = k.s[seg] + k.v[seg] * tau + 0.5 * accel * tau**2
    return np.clip(s, k.s[seg], k.s[seg + 1])


def speed_at_array(traj: Trajectory, times: npt.ArrayLike) -> npt.NDArray[np.float64]:
    times = np.atleast_1d(np.asarray(times, dtype=np.float64))
    _check_span(traj, times)
    k = _kinematics(traj)
    tau_abs = times - traj.start_time
    seg = np.clip(np.searchsorted(k.t, tau_abs, side="right") - 1, 0, len(k.t) - 2)
    frac = (tau_abs - k.t[seg]) / (k.t[seg + 1] - k.t[seg])
    return k.v[seg] + (k.v[seg + 1] - k.v[seg]) * frac


def time_at_distance_array(traj: Trajectory, distances: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Absolute time at which the model reaches each along-route distance."""
    s_query = np.atleast_1d(np.asarray(distances, dtype=np.float64))
    k = _kinematics(traj)
    if traj.route_length == 0.0:
        return np.full(s_query.shape, float(traj.start_time))
    s_query = np.clip(s_query, 0.0, k.s[-1])
    seg = np.clip(np.searchsorted(k.s, s_query, side="right") - 1, 0, len(k.s) - 2)
    dt = k.t[seg + 1] - k.t[seg]
    v0 = k.v[seg]
    accel = (k.v[seg + 1] - v0) / dt
    ds = s_query - k.s[seg]
    root = np.sqrt(np.maximum(v0**2 + 2 * accel * ds, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        tau = np.where(v0 + root > 0, 2 * ds / (v0 + root), 0.0)
    return traj.start_time + np.minimum(k.t[seg] + tau, k.t[seg + 1])


def locate_on_route(
    route: Route, distances: npt.ArrayLike
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Lat/lon arrays for along-route distances."""
    cum = route_cumulative(route)
    wlats, wlons = _waypoint_arrays(route)
    d = np.clip(np.atleast_1d(np.asarray(distances, dtype=np.float64)), 0.0, cum[-1])
    j = np.clip(np.searchsorted(cum, d, side="right") - 1, 0, len(cum) - 2)
    seg = cum[j + 1] - cum[j]
    with np.errstate(divide="ignore", invalid="ignore"):
        fraction = np.where(seg > 0, (d - cum[j]) / np.where(seg > 0, seg, 1.0), 0.0)
    return intermediate_point_array(wlats[j], wlons[j], wlats[j + 1], wlons[j + 1], fraction)


@lru_cache(maxsize=4096)
def _waypoint_arrays(route: Route) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    return (
        np.array([p.lat for p in route.waypoints]),
        np.array([p.lon for p in route.waypoints]),
    )


def position_at(traj: Trajectory, t: float) -> GeoPoint:
    """
    Modelled position at absolute time t

    Raises:
        OutOfRangeError: t outside [start_time, end_time]
    """
    s = path_distance_at_array(traj, [t])
    lats, lons = locate_on_route(traj.route, s)
    return GeoPoint(float(lats[0]), float(lons[0]))


def distance_to_route_m(p: GeoPoint, route: Route) -> float:
    return min(
        distance_to_segment_m(p, a, b) for a, b in zip(route.waypoints, route.waypoints[1:])
    )


_WINDOW_SAMPLES = 41


def closest_approach_time(traj: Trajectory, p: GeoPoint, t: float, half_window: float) -> float:
    """
    Time the model passes closest to p, searched in a window around t

    The window doubles while the best sample sits on its edge, so that
    self-crossing routes resolve to the pass nearest in time.
    """
    span = traj.end_time - traj.start_time
    half = max(half_window, 1.0)
    while True:
        lo = max(traj.start_time, t - half)
        hi = min(traj.end_time, t + half)
        times = np.unique(np.concatenate([np.linspace(lo, hi, _WINDOW_SAMPLES), [t]]))
        lats, lons = locate_on_route(traj.route, path_distance_at_array(traj, times))
        k = int(np.argmin(distance_m_array(p.lat, p.lon, lats, lons)))
        on_edge = (k == 0 and lo > traj.start_time) or (k == len(times) - 1 and hi < traj.end_time)
        if not on_edge or half >= span:
            return float(times[k])
        half *= 2


@dataclass(frozen=True)
class SpeedComparisonRow:
    bin_kmh: int
    records: int
    mean_reported_kmh: float
    mean_inferred_kmh: float
    mean_model_kmh: float


@measure_latency("validate_model")
def validate_model(
    movements: Sequence[Movement],
    trajectories: Sequence[Trajectory],
    d_tol: float = 100.0,
) -> tuple[ModelAccuracyReport, list[SpeedComparisonRow]]:
    """
    Compare message positions with the trajectory model

    Returns:
        Accuracy report and the reported/inferred/model speed comparison per 1 km/h bin
    """
    position_err: list[float] = []
    route_dist: list[float] = []
    time_off: list[float] = []
    rel_pos: list[float] = []
    rel_time: list[float] = []
    speed_rows: dict[int, list[tuple[float, float, float]]] = {}

    for movement, traj in zip(movements, trajectories, strict=True):
        records = movement.records
        times = np.array([r.time for r in records], dtype=np.float64)
        steps = np.diff(times)
        half_window = 2.0 * float(np.median(steps)) if len(steps) else 1.0
        lats, lons = locate_on_route(traj.route, path_distance_at_array(traj, times))
        model_speed = speed_at_array(traj, times)
        for i, record in enumerate(records):
            err = distance_m(record.pos, GeoPoint(float(lats[i]), float(lons[i])))
            offset = abs(closest_approach_time(traj, record.pos, record.time, half_window) - record.time)
            position_err.append(err)
            route_dist.append(distance_to_route_m(record.pos, traj.route))
            time_off.append(offset)
            if traj.route_length > 0:
                rel_pos.append(err / traj.route_length)
            if traj.duration > 0:
                rel_time.append(offset / traj.duration)
            if record.sog is not None and i > 0 and records[i - 1].time < record.time:
                inferred = distance_m(records[i - 1].pos, record.pos) / (
                    record.time - records[i - 1].time
                )
                reported_kmh = record.sog * 1.852
                speed_rows.setdefault(int(math.floor(reported_kmh)), []).append(
                    (reported_kmh, inferred * 3.6, float(model_speed[i]) * 3.6)
                )

    if not position_err:
        return ModelAccuracyReport(), []

    def pct(values: list[float], q: float) -> float:
        return float(np.percentile(values, q)) if values else 0.0

    report = ModelAccuracyReport(
        records=len(position_err),
        median_position_error_m=pct(position_err, 50),
        p90_position_error_m=pct(position_err, 90),
        median_route_distance_m=pct(route_dist, 50),
        p90_route_distance_m=pct(route_dist, 90),
        share_route_distance_above_tol=float(np.mean(np.array(route_dist) > d_tol)),
        median_time_offset_s=pct(time_off, 50),
        p90_time_offset_s=pct(time_off, 90),
        median_relative_position_error=pct(rel_pos, 50),
        median_relative_time_offset=pct(rel_time, 50),
    )
    comparison = [
        SpeedComparisonRow(
            bin_kmh=bin_kmh,
            records=len(rows),
            mean_reported_kmh=float(np.mean([r[0] for r in rows])),
            mean_inferred_kmh=float(np.mean([r[1] for r in rows])),
            mean_model_kmh=float(np.mean([r[2] for r in rows])),
        )
        for bin_kmh, rows in sorted(speed_rows.items())
    ]
    logger.info(
        "model_validated",
        records=report.records,
        median_position_error_m=round(report.median_position_error_m, 3),
        median_route_distance_m=round(report.median_route_distance_m, 3),
        median_time_offset_s=round(report.median_time_offset_s, 3),
    )
    return report, comparison
