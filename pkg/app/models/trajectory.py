"""
Route and trajectory model types
"""

from __future__ import annotations

from dataclasses import dataclass

from app.core.exceptions import ValidationError
from app.models.record import GeoPoint


@dataclass(frozen=True, slots=True)
class Route:
    """Simplified geometric track: a subset of the movement's message positions."""

    waypoints: tuple[GeoPoint, ...]
    d_tol: float = 100.0
    source_indices: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if len(self.waypoints) < 2:
            raise ValidationError("a route needs at least two waypoints")
        if self.source_indices and len(self.source_indices) != len(self.waypoints):
            raise ValidationError("source_indices must align with waypoints")

    @property
    def start(self) -> GeoPoint:
        return self.waypoints[0]

    @property
    def end(self) -> GeoPoint:
        return self.waypoints[-1]


@dataclass(frozen=True, slots=True)
class SpeedPoint:
    """
    Speed control point along a route

    Attributes:
        path_distance: meters from the route start
        time: seconds from the movement start
        speed: m/s
    """

    path_distance: float
    time: float
    speed: float

    def __post_init__(self) -> None:
        if self.speed < 0:
            raise ValidationError(f"negative control point speed {self.speed}")


@dataclass(frozen=True, slots=True)
class Trajectory:
    """Route plus speed model for one movement."""

    mmsi: int
    route: Route
    speed_points: tuple[SpeedPoint, ...]
    start_time: int
    end_time: int
    route_length: float

    def __post_init__(self) -> None:
        if self.end_time < self.start_time:
            raise ValidationError("trajectory ends before it starts")
        if len(self.speed_points) < 2:
            raise ValidationError("a speed model needs at least two control points")
        degenerate = self.route_length == 0.0
        for prev, cur in zip(self.speed_points, self.speed_points[1:]):
            if cur.time <= prev.time:
                raise ValidationError("control point times must strictly increase")
            if cur.path_distance <= prev.path_distance and not degenerate:
                raise ValidationError("control point distances must strictly increase")

    @property
    def duration(self) -> int:
        return self.end_time - self.start_time

    @property
    def exit_speed(self) -> float:
        """Final control point speed in m/s."""
        return self.speed_points[-1].speed

    @property
    def entry_speed(self) -> float:
        """Initial control point speed in m/s."""
        return self.speed_points[0].speed
