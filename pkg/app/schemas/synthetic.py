"""
Ground truth emitted alongside a synthetic record corpus
"""

from typing import Literal

from pydantic import Field

from app.schemas.base import BaseSchema


class TruthInterval(BaseSchema):
    state: Literal["moving", "stationary", "absent"]
    start: int
    end: int


class VesselTruth(BaseSchema):
    """
    What the pipeline should recover for one vessel

    Intervals tile [first record, last record] of the in-ROI records.
    """

    mmsi: int
    vessel_type: int | None = None
    movements: int = Field(ge=0)
    absences: int = Field(default=0, ge=0)
    exit_areas: list[str] = Field(default_factory=list)
    intervals: list[TruthInterval] = Field(default_factory=list)


class SyntheticTruth(BaseSchema):
    seed: int
    start: int
    end: int
    bin_s: int = 240
    hubs: list[tuple[float, float]] = Field(default_factory=list)
    vessels: list[VesselTruth] = Field(default_factory=list)
    collision_mmsi: int | None = None
    collision_hidden_s: int = Field(default=0, ge=0)
