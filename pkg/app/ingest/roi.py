"""
Region of interest: bounding box, timezone buckets, on-land rejection
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from itertools import islice
from typing import Iterable, Iterator

import numpy as np

from app.core.config import Settings
from app.core.logging import get_logger
from app.geo.grid import GridSpec
from app.ingest.areas import AreaVariant, TransitArea, transit_areas
from app.landmask.protocol import LandMaskProtocol
from app.models.record import AisRecord, GeoPoint

logger = get_logger(__name__)

_CHUNK = 65_536


@dataclass(frozen=True)
class RoiSpec:
    lat_min: float = 53.0
    lat_max: float = 66.0
    lon_min: float = 9.0
    lon_max: float = 32.0
    timezone_split_lon: float = 19.5
    areas: tuple[TransitArea, ...] = field(default_factory=transit_areas)
    land_mask: LandMaskProtocol | None = None

    @classmethod
    def from_settings(
        cls,
        config: Settings,
        land_mask: LandMaskProtocol | None = None,
        variant: AreaVariant | None = None,
    ) -> RoiSpec:
        return cls(
            lat_min=config.roi_lat_min,
            lat_max=config.roi_lat_max,
            lon_min=config.roi_lon_min,
            lon_max=config.roi_lon_max,
            timezone_split_lon=config.timezone_split_lon,
            areas=transit_areas(AreaVariant(variant or config.transit_area_variant)),
            land_mask=land_mask,
        )

    def with_areas(self, areas: tuple[TransitArea, ...]) -> RoiSpec:
        return dataclasses.replace(self, areas=areas)

    def contains(self, p: GeoPoint) -> bool:
        return self.lat_min <= p.lat <= self.lat_max and self.lon_min <= p.lon <= self.lon_max

    def utc_offset(self, lon: float) -> int:
        """1 west of the split longitude, 2 east of it."""
        return 1 if lon < self.timezone_split_lon else 2

    def grid(self, dphi_arcsec: float = 15.0, dlon_arcsec: float = 30.0) -> GridSpec:
        return GridSpec.from_arcsec(
            self.lat_min, self.lat_max, self.lon_min, self.lon_max, dphi_arcsec, dlon_arcsec
        )


def filter_roi(
    records: Iterable[AisRecord],
    roi: RoiSpec,
    window: tuple[int, int] | None = None,
) -> Iterator[AisRecord]:
    """
    Keep records inside the ROI (and the analysis window), off land, tagged with a UTC bucket

    Raises:
        CoverageError: the land mask lacks data for an in-ROI record
    """
    iterator = iter(records)
    dropped_outside = dropped_land = dropped_window = 0
    while chunk := list(islice(iterator, _CHUNK)):
        inside: list[AisRecord] = []
        for r in chunk:
            if not roi.contains(r.pos):
                dropped_outside += 1
            elif window is not None and not window[0] <= r.time <= window[1]:
                dropped_window += 1
            else:
                inside.append(r)
        if roi.land_mask is not None and inside:
            lats = np.fromiter((r.pos.lat for r in inside), dtype=np.float64, count=len(inside))
            lons = np.fromiter((r.pos.lon for r in inside), dtype=np.float64, count=len(inside))
            on_land = roi.land_mask.land_flags(lats, lons)
            dropped_land += int(np.count_nonzero(on_land))
            inside = [r for r, land in zip(inside, on_land) if not land]
        for r in inside:
            offset = roi.utc_offset(r.pos.lon)
            yield r if r.utc_offset == offset else dataclasses.replace(r, utc_offset=offset)

    logger.info(
        "roi_filtered",
        dropped_outside=dropped_outside,
        dropped_window=dropped_window,
        dropped_land=dropped_land,
    )
