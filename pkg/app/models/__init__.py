"""
Domain types shared by the whole pipeline
"""

from app.models.journey import AbsentPeriod, Journey, Leg, Movement, StationaryPeriod
from app.models.port import PortArea
from app.models.record import AisRecord, GeoPoint, RecordKind, format_mmsi
from app.models.trajectory import Route, SpeedPoint, Trajectory
from app.models.vessel import (
    SizeClass,
    VesselCategory,
    categorize,
    dominant_vessel_type,
    size_class,
)

__all__ = [
    "AbsentPeriod",
    "AisRecord",
    "GeoPoint",
    "Journey",
    "Leg",
    "Movement",
    "PortArea",
    "RecordKind",
    "Route",
    "SizeClass",
    "SpeedPoint",
    "StationaryPeriod",
    "Trajectory",
    "VesselCategory",
    "categorize",
    "dominant_vessel_type",
    "format_mmsi",
    "size_class",
]
