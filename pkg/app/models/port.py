"""
Port area domain type
"""

from __future__ import annotations

from dataclasses import dataclass

from app.core.exceptions import ValidationError
from app.models.record import GeoPoint


@dataclass(frozen=True, slots=True)
class PortArea:
    """
    Connected set of grid cells around a mooring overdensity

    Attributes:
        cells: (row, col) pairs, sorted
        barycenter: density-weighted centroid of the cells
        coast_distance_km: distance from the barycenter to the nearest land cell,
            None without land in the mask
    """

    id: int
    cells: tuple[tuple[int, int], ...]
    barycenter: GeoPoint
    area_km2: float
    vessels_in_port: float = 0.0
    arrivals_per_day: float = 0.0
    top_destination: str | None = None
    coast_distance_km: float | None = None

    def __post_init__(self) -> None:
        if not self.cells:
            raise ValidationError(f"port {self.id} has no cells")

    @property
    def n_cells(self) -> int:
        return len(self.cells)
