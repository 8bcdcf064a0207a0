"""
Report and manifest schemas written next to the pipeline outputs
"""

from typing import Literal

from pydantic import Field

from app.schemas.base import BaseSchema


class CleanseReport(BaseSchema):
    """
    Counters for every cleansing step

    Records end up in exactly one of three places: a movement, a stationary
    set, or one of the removal counters.
    """

    input_records: int = 0
    input_vessels: int = 0

    static_vessels_removed: int = 0
    static_vessel_records_removed: int = 0
    positions_corrected: int = 0
    duplicates_removed: int = 0
    singletons_removed: int = 0
    area_segment_records_removed: int = 0
    outliers_speed: int = 0
    outliers_acceleration: int = 0
    outliers_isolated: int = 0
    reclassified_stationary: int = 0
    merge_records_dropped: int = 0
    vessels_dropped: int = 0
    vessels_dropped_records: int = 0

    movements_pass1: int = 0
    movements_pass2: int = 0
    movements_reclassified: int = 0
    movements_merged: int = 0
    movements_final: int = 0

    kept_in_movements: int = 0
    stationary_records: int = 0
    output_vessels: int = 0

    @property
    def removed_records(self) -> int:
        return (
            self.static_vessel_records_removed
            + self.duplicates_removed
            + self.singletons_removed
            + self.area_segment_records_removed
            + self.outliers_speed
            + self.outliers_acceleration
            + self.outliers_isolated
            + self.merge_records_dropped
            + self.vessels_dropped_records
        )

    def is_conserved(self) -> bool:
        return self.input_records == (
            self.kept_in_movements + self.stationary_records + self.removed_records
        )

    def merge(self, other: "CleanseReport") -> "CleanseReport":
        """Field-wise sum; associative and commutative."""
        mine = self.model_dump()
        theirs = other.model_dump()
        return CleanseReport(**{key: mine[key] + theirs[key] for key in mine})


class ModelAccuracyReport(BaseSchema):
    """Agreement between message positions and the trajectory model."""

    records: int = 0
    median_position_error_m: float = 0.0
    p90_position_error_m: float = 0.0
    median_route_distance_m: float = 0.0
    p90_route_distance_m: float = 0.0
    share_route_distance_above_tol: float = 0.0
    median_time_offset_s: float = 0.0
    p90_time_offset_s: float = 0.0
    median_relative_position_error: float = 0.0
    median_relative_time_offset: float = 0.0


class RejectedRerunReport(BaseSchema):
    """Travel time reconstructed from rejected records compared with the main run."""

    rejected_records: int = Field(default=0, ge=0)
    rejected_travel_days: float = Field(default=0.0, ge=0)
    main_travel_days: float = Field(default=0.0, ge=0)
    ratio: float = Field(default=0.0, ge=0)


StageState = Literal["ok", "failed", "skipped"]


class StageStatus(BaseSchema):
    state: StageState
    error: str | None = None


class RunManifest(BaseSchema):
    app: str
    version: str
    command: str
    config_hash: str
    inputs: dict[str, str] = Field(default_factory=dict)
    packages: dict[str, str] = Field(default_factory=dict)
    stages: dict[str, StageStatus] = Field(default_factory=dict)
    outputs: list[str] = Field(default_factory=list)
    effective_config: dict = Field(default_factory=dict)


class TravelTimeSummary(BaseSchema):
    """Total on-trajectory time of a run, read back by the rejected-record rerun."""

    trajectories: int = Field(default=0, ge=0)
    travel_days: float = Field(default=0.0, ge=0)
