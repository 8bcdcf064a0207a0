"""
Regular latitude/longitude grid over the region of interest
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from app.core.exceptions import OutOfBoundsError, ValidationError
from app.geo.sphere import EARTH_RADIUS_M
from app.models.record import GeoPoint

ARCSEC_DEG = 1.0 / 3600.0

# Absorbs float error when a coordinate sits exactly on a cell edge.
EDGE_EPS = 1e-9


@dataclass(frozen=True, slots=True)
class GridSpec:
    """
    Cell layout: rows run south to north, columns west to east

    Attributes:
        dphi: cell height in degrees of latitude
        dlon: cell width in degrees of longitude
    """

    lat_min: float
    lat_max: float
    lon_min: float
    lon_max: float
    dphi: float = 15 * ARCSEC_DEG
    dlon: float = 30 * ARCSEC_DEG

    def __post_init__(self) -> None:
        if self.lat_min >= self.lat_max or self.lon_min >= self.lon_max:
            raise ValidationError("grid bounds must satisfy min < max")
        if self.dphi <= 0 or self.dlon <= 0:
            raise ValidationError("grid spacing must be positive")

    @classmethod
    def from_arcsec(
        cls,
        lat_min: float,
        lat_max: float,
        lon_min: float,
        lon_max: float,
        dphi_arcsec: float = 15.0,
        dlon_arcsec: float = 30.0,
    ) -> GridSpec:
        return cls(
            lat_min, lat_max, lon_min, lon_max, dphi_arcsec * ARCSEC_DEG, dlon_arcsec * ARCSEC_DEG
        )

    @property
    def n_rows(self) -> int:
        return math.ceil((self.lat_max - self.lat_min) / self.dphi - EDGE_EPS)

    @property
    def n_cols(self) -> int:
        return math.ceil((self.lon_max - self.lon_min) / self.dlon - EDGE_EPS)

    @property
    def shape(self) -> tuple[int, int]:
        return self.n_rows, self.n_cols

    @property
    def cell_height_m(self) -> float:
        return EARTH_RADIUS_M * math.radians(self.dphi)

    def row_center_lat(self, row: int) -> float:
        return self.lat_min + (row + 0.5) * self.dphi

    def cell_width_m(self, row: int) -> float:
        return EARTH_RADIUS_M * math.radians(self.dlon) * math.cos(
            math.radians(self.row_center_lat(row))
        )

    def row_widths_m(self) -> npt.NDArray[np.float64]:
        centers = self.lat_min + (np.arange(self.n_rows) + 0.5) * self.dphi
        return EARTH_RADIUS_M * math.radians(self.dlon) * np.cos(np.radians(centers))

    def row_areas_km2(self) -> npt.NDArray[np.float64]:
        """Cell area per row in km2; broadcast against (rows, cols) arrays with [:, None]."""
        return self.row_widths_m() * self.cell_height_m / 1e6

    def cell_area_km2(self, row: int) -> float:
        return self.cell_width_m(row) * self.cell_height_m / 1e6

    def cell_center(self, row: int, col: int) -> GeoPoint:
        return GeoPoint(self.row_center_lat(row), self.lon_min + (col + 0.5) * self.dlon)

    def contains(self, p: GeoPoint) -> bool:
        return self.lat_min <= p.lat <= self.lat_max and self.lon_min <= p.lon <= self.lon_max


def cell_index(p: GeoPoint, grid: GridSpec) -> tuple[int, int]:
    """
    Grid cell holding p

    Points on an interior edge belong to the higher-index cell; points on the
    maximum edge belong to the last row/column.

    Raises:
        OutOfBoundsError: p outside the grid bounds
    """
    if not grid.contains(p):
        raise OutOfBoundsError(f"({p.lat}, {p.lon}) outside grid bounds")
    row = min(math.floor((p.lat - grid.lat_min) / grid.dphi + EDGE_EPS), grid.n_rows - 1)
    col = min(math.floor((p.lon - grid.lon_min) / grid.dlon + EDGE_EPS), grid.n_cols - 1)
    return row, col


def cell_indices(
    lats: npt.ArrayLike, lons: npt.ArrayLike, grid: GridSpec
) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.int64], npt.NDArray[np.bool_]]:
    """
    Vectorized cell_index

    Returns:
        (rows, cols, inside); rows/cols of points outside the grid are -1
    """
    lats = np.asarray(lats, dtype=np.float64)
    lons = np.asarray(lons, dtype=np.float64)
    inside = (
        (lats >= grid.lat_min)
        & (lats <= grid.lat_max)
        & (lons >= grid.lon_min)
        & (lons <= grid.lon_max)
    )
    rows = np.minimum(np.floor((lats - grid.lat_min) / grid.dphi + EDGE_EPS), grid.n_rows - 1)
    cols = np.minimum(np.floor((lons - grid.lon_min) / grid.dlon + EDGE_EPS), grid.n_cols - 1)
    rows = np.where(inside, rows, -1).astype(np.int64)
    cols = np.where(inside, cols, -1).astype(np.int64)
    return rows, cols, inside


def mean_segment_length(alpha: float, r: float, h: float) -> float:
    """
    Mean chord length of parallel lines at bearing `alpha` crossing a w x h cell

    Args:
        alpha: crossing bearing in degrees (0 = north)
        r: width/height ratio w/h
        h: cell height in meters
    """
    return float(mean_segment_lengths(alpha, r, h))


def mean_segment_lengths(
    alpha: npt.ArrayLike, r: npt.ArrayLike, h: float
) -> npt.NDArray[np.float64]:
    """Vectorized mean_segment_length over bearings and aspect ratios."""
    ratio = np.asarray(r, dtype=np.float64)
    if h <= 0 or np.any(ratio <= 0):
        raise ValidationError("cell height and aspect ratio must be positive")
    rad = np.radians(np.asarray(alpha, dtype=np.float64))
    return ratio * h / (ratio * np.abs(np.cos(rad)) + np.abs(np.sin(rad)))
