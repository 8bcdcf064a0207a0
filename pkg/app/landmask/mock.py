"""
Mock LandMask Implementation
Open water everywhere; used when no elevation raster is configured and in tests.
"""

from __future__ import annotations

import math

import numpy as np
import numpy.typing as npt

from app.landmask.base import LAND_ELEVATION_M, BaseLandMask
from app.models.record import GeoPoint


class OpenWaterMask(BaseLandMask):
    def __init__(self, depth_m: float = -50.0, threshold_m: float = LAND_ELEVATION_M) -> None:
        super().__init__(threshold_m)
        self.depth_m = depth_m

    def elevations(
        self, lats: npt.ArrayLike, lons: npt.ArrayLike
    ) -> npt.NDArray[np.float64]:
        return np.full(np.shape(np.atleast_1d(lats)), self.depth_m, dtype=np.float64)

    def distance_to_land_m(self, p: GeoPoint) -> float:
        return math.inf
