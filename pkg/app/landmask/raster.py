"""
Raster land mask backed by an Esri ASCII elevation grid
"""

from __future__ import annotations

import math
from functools import cached_property
from pathlib import Path

import numpy as np
import numpy.typing as npt
from scipy import ndimage

from app.core.exceptions import CoverageError
from app.core.logging import get_logger
from app.geo.esri import AsciiGrid, read_ascii_grid
from app.geo.sphere import EARTH_RADIUS_M
from app.landmask.base import LAND_ELEVATION_M, BaseLandMask
from app.models.record import GeoPoint

logger = get_logger(__name__)


class RasterLandMask(BaseLandMask):
    """
    Nearest-neighbour elevation lookup on a regular lat/lon raster

    Cells holding nodata have no coverage; querying them raises CoverageError.
    """

    def __init__(self, grid: AsciiGrid, threshold_m: float = LAND_ELEVATION_M) -> None:
        super().__init__(threshold_m)
        self.grid = grid

    @classmethod
    def from_file(cls, path: Path | str, threshold_m: float = LAND_ELEVATION_M) -> RasterLandMask:
        grid = read_ascii_grid(path)
        logger.info(
            "land_mask_loaded",
            path=str(path),
            nrows=grid.nrows,
            ncols=grid.ncols,
            land_cells=int(np.count_nonzero(grid.data > threshold_m)),
        )
        return cls(grid, threshold_m)

    def _indices(
        self, lats: npt.ArrayLike, lons: npt.ArrayLike
    ) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.int64]]:
        lats = np.atleast_1d(np.asarray(lats, dtype=np.float64))
        lons = np.atleast_1d(np.asarray(lons, dtype=np.float64))
        rows = np.floor((lats - self.grid.yllcorner) / self.grid.dy).astype(np.int64)
        cols = np.floor((lons - self.grid.xllcorner) / self.grid.dx).astype(np.int64)
        # the outer edge belongs to the last cell
        rows = np.where(rows == self.grid.nrows, self.grid.nrows - 1, rows)
        cols = np.where(cols == self.grid.ncols, self.grid.ncols - 1, cols)
        outside = (rows < 0) | (rows >= self.grid.nrows) | (cols < 0) | (cols >= self.grid.ncols)
        if np.any(outside):
            k = int(np.argmax(outside))
            raise CoverageError(f"land mask has no coverage at ({lats[k]}, {lons[k]})")
        return rows, cols

    def elevations(
        self, lats: npt.ArrayLike, lons: npt.ArrayLike
    ) -> npt.NDArray[np.float64]:
        rows, cols = self._indices(lats, lons)
        values = self.grid.data[rows, cols]
        if np.any(np.isnan(values)):
            raise CoverageError("land mask holds nodata at a queried position")
        return values

    @cached_property
    def _land_distance_m(self) -> npt.NDArray[np.float64]:
        land = np.nan_to_num(self.grid.data, nan=-np.inf) > self.threshold_m
        if not land.any():
            return np.full(land.shape, np.inf)
        mean_lat = self.grid.yllcorner + self.grid.dy * self.grid.nrows / 2
        dy_m = EARTH_RADIUS_M * math.radians(self.grid.dy)
        dx_m = EARTH_RADIUS_M * math.radians(self.grid.dx) * math.cos(math.radians(mean_lat))
        return ndimage.distance_transform_edt(~land, sampling=(dy_m, dx_m))

    def distance_to_land_m(self, p: GeoPoint) -> float:
        rows, cols = self._indices([p.lat], [p.lon])
        return float(self._land_distance_m[rows[0], cols[0]])
