"""
Pydantic schemas for inputs, reports, metric tables and the run manifest
"""

from app.schemas.base import BaseSchema
from app.schemas.metrics import AverageRow, CycleSummary, DailyCycleRow, UncertaintyRow
from app.schemas.record import RECORD_FIELDS, RecordLine
from app.schemas.report import (
    CleanseReport,
    ModelAccuracyReport,
    RejectedRerunReport,
    RunManifest,
    StageStatus,
    TravelTimeSummary,
)

__all__ = [
    "RECORD_FIELDS",
    "AverageRow",
    "BaseSchema",
    "CleanseReport",
    "CycleSummary",
    "DailyCycleRow",
    "ModelAccuracyReport",
    "RecordLine",
    "RejectedRerunReport",
    "RunManifest",
    "StageStatus",
    "TravelTimeSummary",
    "UncertaintyRow",
]
