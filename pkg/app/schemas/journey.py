"""
Journey dump schema (trajectories.jsonl)
"""

from typing import Literal, Union

from pydantic import Field

from app.models.journey import AbsentPeriod, Journey, Leg, StationaryPeriod
from app.models.trajectory import Trajectory
from app.schemas.base import BaseSchema


class TrajectoryLeg(BaseSchema):
    kind: Literal["trajectory"] = "trajectory"
    start: int
    end: int
    route_length_m: float
    waypoints: list[tuple[float, float]]
    speed_points: list[tuple[float, float, float]] = Field(
        description="(path distance m, seconds from start, speed m/s)"
    )


class StationaryLeg(BaseSchema):
    kind: Literal["stationary"] = "stationary"
    start: int
    end: int
    idle_pos: tuple[float, float]
    position_resolved: bool


class AbsentLeg(BaseSchema):
    kind: Literal["absent"] = "absent"
    start: int
    end: int
    exit_area: str | None = None
    entry_area: str | None = None


LegLine = Union[TrajectoryLeg, StationaryLeg, AbsentLeg]


def _leg_line(leg: Leg) -> LegLine:
    if isinstance(leg, Trajectory):
        return TrajectoryLeg(
            start=leg.start_time,
            end=leg.end_time,
            route_length_m=leg.route_length,
            waypoints=[(p.lat, p.lon) for p in leg.route.waypoints],
            speed_points=[(s.path_distance, s.time, s.speed) for s in leg.speed_points],
        )
    if isinstance(leg, StationaryPeriod):
        return StationaryLeg(
            start=leg.start_time,
            end=leg.end_time,
            idle_pos=(leg.idle_pos.lat, leg.idle_pos.lon),
            position_resolved=leg.position_resolved,
        )
    return _absent(leg)


def _absent(period: AbsentPeriod) -> AbsentLeg:
    return AbsentLeg(
        start=period.start_time,
        end=period.end_time,
        exit_area=period.exit_area,
        entry_area=period.entry_area,
    )


class JourneyLine(BaseSchema):
    """One vessel's journey with legs tagged by kind; edge absences kept apart."""

    mmsi: int
    category: str
    gross_tonnage: float | None = None
    utc_offset: int | None = None
    edge_entry: AbsentLeg | None = None
    edge_exit: AbsentLeg | None = None
    legs: list[LegLine]

    @classmethod
    def from_journey(cls, journey: Journey) -> "JourneyLine":
        return cls(
            mmsi=journey.mmsi,
            category=journey.category.value,
            gross_tonnage=journey.gross_tonnage,
            utc_offset=journey.utc_offset,
            edge_entry=_absent(journey.edge_entry) if journey.edge_entry else None,
            edge_exit=_absent(journey.edge_exit) if journey.edge_exit else None,
            legs=[_leg_line(leg) for leg in journey.legs],
        )

    def to_line(self) -> str:
        return self.model_dump_json(exclude_none=True)
