"""
Movement, period and journey domain types
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from app.core.exceptions import ConsistencyError, ValidationError
from app.models.record import AisRecord, GeoPoint
from app.models.trajectory import Trajectory
from app.models.vessel import VesselCategory

# Legs may meet within this slack (one-second timestamps).
CONTIGUITY_SLACK_S = 1


@dataclass(frozen=True, slots=True)
class Movement:
    """Time-ordered records classified as one continuous vessel motion."""

    mmsi: int
    records: tuple[AisRecord, ...]

    def __post_init__(self) -> None:
        if len(self.records) < 2:
            raise ValidationError("a movement needs at least two records")
        times = [record.time for record in self.records]
        if any(later < earlier for earlier, later in zip(times, times[1:])):
            raise ValidationError("movement records must be time-ordered")

    @property
    def start_time(self) -> int:
        return self.records[0].time

    @property
    def end_time(self) -> int:
        return self.records[-1].time

    def __len__(self) -> int:
        return len(self.records)


@dataclass(frozen=True, slots=True)
class StationaryPeriod:
    mmsi: int
    start_time: int
    end_time: int
    idle_pos: GeoPoint
    position_resolved: bool

    def __post_init__(self) -> None:
        if self.end_time < self.start_time:
            raise ValidationError("stationary period ends before it starts")

    @property
    def duration(self) -> int:
        return self.end_time - self.start_time


@dataclass(frozen=True, slots=True)
class AbsentPeriod:
    mmsi: int
    start_time: int
    end_time: int
    exit_area: str | None = None
    entry_area: str | None = None

    def __post_init__(self) -> None:
        if self.end_time < self.start_time:
            raise ValidationError("absent period ends before it starts")

    @property
    def duration(self) -> int:
        return self.end_time - self.start_time


Leg = Union[Trajectory, StationaryPeriod, AbsentPeriod]


@dataclass(frozen=True, slots=True)
class Journey:
    """
    Per-vessel sequence of trajectories interleaved with stationary/absent periods

    `legs` tile [first record, last record]; `edge_entry`/`edge_exit` hold the
    absence before the first and after the last record within the analysis window.
    """

    mmsi: int
    category: VesselCategory
    legs: tuple[Leg, ...]
    gross_tonnage: float | None = None
    edge_entry: AbsentPeriod | None = None
    edge_exit: AbsentPeriod | None = None
    destinations: tuple[tuple[int, str], ...] = field(default=())
    utc_offset: int | None = None

    def __post_init__(self) -> None:
        if not self.legs:
            raise ValidationError("a journey needs at least one leg")
        for prev, cur in zip(self.legs, self.legs[1:]):
            if abs(cur.start_time - prev.end_time) > CONTIGUITY_SLACK_S:
                raise ConsistencyError(
                    f"mmsi={self.mmsi}: legs not contiguous at {prev.end_time}/{cur.start_time}"
                )

    @property
    def start_time(self) -> int:
        return self.legs[0].start_time

    @property
    def end_time(self) -> int:
        return self.legs[-1].end_time

    @property
    def trajectories(self) -> list[Trajectory]:
        return [leg for leg in self.legs if isinstance(leg, Trajectory)]

    @property
    def stationary_periods(self) -> list[StationaryPeriod]:
        return [leg for leg in self.legs if isinstance(leg, StationaryPeriod)]

    @property
    def absent_periods(self) -> list[AbsentPeriod]:
        return [leg for leg in self.legs if isinstance(leg, AbsentPeriod)]

    def destination_at(self, time: int) -> str | None:
        """Latest reported destination at or before `time`."""
        latest: str | None = None
        for reported_at, destination in self.destinations:
            if reported_at > time:
                break
            latest = destination
        return latest
