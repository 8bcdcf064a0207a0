"""
AIS record domain types
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from app.core.exceptions import ValidationError

MMSI_MAX = 2**32 - 1


def normalize_lon(lon: float) -> float:
    """Map a longitude to [-180, 180)."""
    wrapped = (lon + 180.0) % 360.0 - 180.0
    # float modulo can land exactly on +180 for tiny negative inputs
    return -180.0 if wrapped >= 180.0 else wrapped


@dataclass(frozen=True, slots=True)
class GeoPoint:
    """Position in degrees; longitude normalized to [-180, 180)."""

    lat: float
    lon: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lat) and math.isfinite(self.lon)):
            raise ValidationError(f"non-finite coordinate ({self.lat}, {self.lon})")
        if not -90.0 <= self.lat <= 90.0:
            raise ValidationError(f"latitude {self.lat} outside [-90, 90]")
        if not -180.0 <= self.lon < 180.0:
            object.__setattr__(self, "lon", normalize_lon(self.lon))


class RecordKind(str, Enum):
    POSITION = "pos"
    STATIC = "static"


@dataclass(frozen=True, slots=True)
class AisRecord:
    """
    One decoded AIS-A report

    Attributes:
        mmsi: vessel identity, stored as unsigned 32-bit integer
        time: UTC seconds
        pos: reported (or corrected) position
        kind: position or static report
        sog: reported speed over ground in knots (position reports)
        vessel_type: AIS ship type code (static reports)
        destination: free-text destination (static reports)
        utc_offset: timezone bucket (1 or 2) assigned by the ROI filter
    """

    mmsi: int
    time: int
    pos: GeoPoint
    kind: RecordKind = RecordKind.POSITION
    sog: float | None = None
    vessel_type: int | None = None
    destination: str | None = None
    utc_offset: int | None = None

    def __post_init__(self) -> None:
        if not 0 <= self.mmsi <= MMSI_MAX:
            raise ValidationError(f"mmsi {self.mmsi} outside unsigned 32-bit range")
        if self.time < 0:
            raise ValidationError(f"negative record time {self.time}")
        if self.sog is not None and not self.sog >= 0:
            raise ValidationError(f"negative speed over ground {self.sog}")
        if self.vessel_type is not None and not 0 <= self.vessel_type <= 99:
            raise ValidationError(f"vessel type {self.vessel_type} outside [0, 99]")

    @property
    def is_static(self) -> bool:
        return self.kind is RecordKind.STATIC

    @property
    def identity(self) -> tuple[int, int, float, float, RecordKind]:
        """Key used to drop replayed duplicates."""
        return (self.mmsi, self.time, self.pos.lat, self.pos.lon, self.kind)


def format_mmsi(mmsi: int) -> str:
    """Zero-padded 9-digit rendering used in outputs."""
    return f"{mmsi:09d}"
