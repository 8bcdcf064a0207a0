"""
Shared land-mask behaviour built on top of a vectorized elevation lookup
"""

from __future__ import annotations

from abc import ABC, abstractmethod

import numpy as np
import numpy.typing as npt

from app.geo.sphere import sample_path_array
from app.landmask.protocol import LandMaskProtocol
from app.models.record import GeoPoint

LAND_ELEVATION_M = 2.0


class BaseLandMask(ABC):
    def __init__(self, threshold_m: float = LAND_ELEVATION_M) -> None:
        self.threshold_m = threshold_m

    @abstractmethod
    def elevations(
        self, lats: npt.ArrayLike, lons: npt.ArrayLike
    ) -> npt.NDArray[np.float64]: ...

    @abstractmethod
    def distance_to_land_m(self, p: GeoPoint) -> float: ...

    def elevation_at(self, p: GeoPoint) -> float:
        return float(self.elevations(np.array([p.lat]), np.array([p.lon]))[0])

    def is_land(self, p: GeoPoint) -> bool:
        return self.elevation_at(p) > self.threshold_m

    def land_flags(self, lats: npt.ArrayLike, lons: npt.ArrayLike) -> npt.NDArray[np.bool_]:
        return self.elevations(lats, lons) > self.threshold_m

    def crosses_land(self, a: GeoPoint, b: GeoPoint, step_m: float = 100.0) -> bool:
        lats, lons = sample_path_array(a, b, step_m)
        return bool(np.any(self.land_flags(lats, lons)))


def crosses_land(
    a: GeoPoint, b: GeoPoint, mask: LandMaskProtocol, step_m: float = 100.0
) -> bool:
    """
    Whether the tracklet a-b passes over land higher than the mask threshold

    Raises:
        CoverageError: a sample falls outside the mask's coverage
    """
    return mask.crosses_land(a, b, step_m)
