"""
Ingest: record sources, region-of-interest filtering and transit areas
"""

from app.ingest.areas import (
    KIEL_CANAL,
    MEMBERSHIP_AREAS,
    SKAGERRAK,
    AreaVariant,
    Box,
    TransitArea,
    in_transit_area,
    kiel_zone,
    transit_areas,
)
from app.ingest.reader import (
    ReadStats,
    RecordReader,
    group_by_vessel,
    read_gross_tonnage,
    read_records,
)
from app.ingest.roi import RoiSpec, filter_roi

__all__ = [
    "KIEL_CANAL",
    "MEMBERSHIP_AREAS",
    "SKAGERRAK",
    "AreaVariant",
    "Box",
    "ReadStats",
    "RecordReader",
    "RoiSpec",
    "TransitArea",
    "filter_roi",
    "group_by_vessel",
    "in_transit_area",
    "kiel_zone",
    "read_gross_tonnage",
    "read_records",
    "transit_areas",
]
