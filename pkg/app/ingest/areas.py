"""
Transit areas through which vessels enter or leave the region of interest
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cache

from app.core.exceptions import ValidationError
from app.models.record import GeoPoint

SKAGERRAK = "Skagerrak"
KIEL_CANAL = "Kiel Canal"

# Areas where absence is decided by membership alone, without the speed threshold.
MEMBERSHIP_AREAS = frozenset({SKAGERRAK, KIEL_CANAL})


class AreaVariant(str, Enum):
    SMALL = "small"
    DEFAULT = "default"
    LARGE = "large"


@dataclass(frozen=True, slots=True)
class Box:
    """Closed lat/lon rectangle."""

    lat_min: float
    lat_max: float
    lon_min: float
    lon_max: float

    def __post_init__(self) -> None:
        if self.lat_min >= self.lat_max or self.lon_min >= self.lon_max:
            raise ValidationError(f"degenerate box {self}")

    def contains(self, p: GeoPoint) -> bool:
        return self.lat_min <= p.lat <= self.lat_max and self.lon_min <= p.lon <= self.lon_max

    def expanded(self, dlat: float, dlon: float) -> Box:
        return Box(self.lat_min - dlat, self.lat_max + dlat, self.lon_min - dlon, self.lon_max + dlon)


@dataclass(frozen=True, slots=True)
class TransitArea:
    name: str
    boxes: tuple[Box, ...]
    variant: AreaVariant = AreaVariant.DEFAULT

    def __post_init__(self) -> None:
        if not self.boxes:
            raise ValidationError(f"transit area {self.name!r} has no boxes")

    def contains(self, p: GeoPoint) -> bool:
        return any(box.contains(p) for box in self.boxes)

    @property
    def lat_min(self) -> float:
        return min(box.lat_min for box in self.boxes)

    @property
    def lat_max(self) -> float:
        return max(box.lat_max for box in self.boxes)

    @property
    def lon_min(self) -> float:
        return min(box.lon_min for box in self.boxes)

    @property
    def lon_max(self) -> float:
        return max(box.lon_max for box in self.boxes)


_VARIANT_LON_MAX: dict[str, dict[AreaVariant, float]] = {
    SKAGERRAK: {AreaVariant.SMALL: 9.02, AreaVariant.DEFAULT: 9.05, AreaVariant.LARGE: 9.10},
    KIEL_CANAL: {AreaVariant.SMALL: 10.145, AreaVariant.DEFAULT: 10.150, AreaVariant.LARGE: 10.160},
}

_FIXED_AREAS: tuple[TransitArea, ...] = (
    TransitArea("Limfjord", (Box(56.535, 57.050, 9.0, 9.05),)),
    TransitArea("Oder River", (Box(53.343, 53.385, 14.493, 14.621),)),
    TransitArea("Telemark", (Box(59.097, 59.130, 9.480, 9.747),)),
    TransitArea(
        "Vänern Lake",
        (Box(57.766, 57.806, 11.805, 11.905), Box(57.677, 57.719, 11.902, 12.002)),
    ),
    TransitArea("Vättern Lake", (Box(58.384, 58.476, 16.620, 16.680),)),
    TransitArea("Södertälje", (Box(59.163, 59.200, 17.631, 17.708),)),
    TransitArea("Stockholm", (Box(59.2918, 59.459, 18.025, 18.084),)),
    TransitArea("Saimaa Canal", (Box(60.700, 60.730, 28.619, 28.830),)),
    TransitArea("Neva River", (Box(59.857, 60.008, 30.259, 30.312),)),
)


@cache
def transit_areas(variant: AreaVariant = AreaVariant.DEFAULT) -> tuple[TransitArea, ...]:
    """The eleven transit areas in table order; only Skagerrak and Kiel Canal vary."""
    variant = AreaVariant(variant)
    skagerrak = TransitArea(
        SKAGERRAK, (Box(57.050, 58.667, 9.0, _VARIANT_LON_MAX[SKAGERRAK][variant]),), variant
    )
    kiel = TransitArea(
        KIEL_CANAL, (Box(54.3636, 54.371, 10.140, _VARIANT_LON_MAX[KIEL_CANAL][variant]),), variant
    )
    return (skagerrak, kiel, *_FIXED_AREAS)


def in_transit_area(
    p: GeoPoint,
    areas: tuple[TransitArea, ...] | None = None,
    variant: AreaVariant = AreaVariant.DEFAULT,
) -> str | None:
    """Name of the first area containing p, or None."""
    for area in areas if areas is not None else transit_areas(variant):
        if area.contains(p):
            return area.name
    return None


def kiel_zone(areas: tuple[TransitArea, ...], dlat: float, dlon: float, cells: int = 1) -> Box:
    """Kiel Canal area grown by `cells` grid cells on every side."""
    for area in areas:
        if area.name == KIEL_CANAL:
            return area.boxes[0].expanded(cells * dlat, cells * dlon)
    raise ValidationError("transit areas lack the Kiel Canal")
