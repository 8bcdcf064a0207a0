"""
LandMask Protocol (Interface)
Defines contract for all elevation sources used to detect land
"""

from typing import Protocol, runtime_checkable

import numpy as np
import numpy.typing as npt

from app.models.record import GeoPoint


@runtime_checkable
class LandMaskProtocol(Protocol):
    """
    Elevation lookup over the region of interest

    All implementations must provide these methods so that the ROI filter,
    the rasterizer and the port finder can swap sources freely.
    """

    threshold_m: float

    def elevation_at(self, p: GeoPoint) -> float:
        """
        Elevation in meters above mean sea level

        Raises:
            CoverageError: no data at p
        """
        ...

    def elevations(
        self, lats: npt.ArrayLike, lons: npt.ArrayLike
    ) -> npt.NDArray[np.float64]:
        """Vectorized elevation_at."""
        ...

    def is_land(self, p: GeoPoint) -> bool:
        """True iff elevation is strictly above the threshold."""
        ...

    def land_flags(self, lats: npt.ArrayLike, lons: npt.ArrayLike) -> npt.NDArray[np.bool_]:
        """Vectorized is_land."""
        ...

    def crosses_land(self, a: GeoPoint, b: GeoPoint, step_m: float = 100.0) -> bool:
        """True iff any great-circle sample between a and b is land."""
        ...

    def distance_to_land_m(self, p: GeoPoint) -> float:
        """Distance to the nearest land cell; infinity when there is none."""
        ...
