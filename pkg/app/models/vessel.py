"""
Vessel categories and size classes
"""

from __future__ import annotations

from collections import Counter
from enum import Enum
from typing import Iterable

from app.core.exceptions import InvalidCodeError


class VesselCategory(str, Enum):
    PASSENGER_HIGH_SPEED = "PassengerHighSpeed"
    LAW_ENFORCEMENT_MILITARY = "LawEnforcementMilitary"
    CARGO = "Cargo"
    PILOT_TUG_RESCUE_DIVING = "PilotTugRescueDiving"
    TANKER = "Tanker"
    OTHERS_INCLUDING_FISHING = "OthersIncludingFishing"


class SizeClass(str, Enum):
    UNKNOWN = "Unknown"
    LT10K = "LT10k"
    GE10K = "GE10k"


def _codes(*spans: tuple[int, int]) -> frozenset[int]:
    return frozenset(code for low, high in spans for code in range(low, high + 1))


# Code 55 is listed under both law enforcement and pilot/tug; law enforcement wins.
_CATEGORY_CODES: dict[VesselCategory, frozenset[int]] = {
    VesselCategory.LAW_ENFORCEMENT_MILITARY: _codes((35, 35), (55, 55)),
    VesselCategory.PASSENGER_HIGH_SPEED: _codes((20, 20), (23, 29), (40, 49), (60, 69)),
    VesselCategory.CARGO: _codes((70, 79)),
    VesselCategory.PILOT_TUG_RESCUE_DIVING: _codes((21, 22), (31, 34), (50, 54), (56, 58)),
    VesselCategory.TANKER: _codes((80, 89)),
}

_CODE_TO_CATEGORY: dict[int, VesselCategory] = {
    code: category for category, codes in _CATEGORY_CODES.items() for code in codes
}


def categorize(vessel_type: int | None) -> VesselCategory:
    """
    Map an AIS ship type code to its reporting category

    Args:
        vessel_type: AIS code in [0, 99], or None when never reported

    Returns:
        Category; absent or unmapped codes fall into OthersIncludingFishing

    Raises:
        InvalidCodeError: code outside [0, 99]
    """
    if vessel_type is None:
        return VesselCategory.OTHERS_INCLUDING_FISHING
    if not 0 <= vessel_type <= 99:
        raise InvalidCodeError(f"vessel type code {vessel_type} outside [0, 99]")
    return _CODE_TO_CATEGORY.get(vessel_type, VesselCategory.OTHERS_INCLUDING_FISHING)


def dominant_vessel_type(codes: Iterable[int | None]) -> int | None:
    """Most frequently reported code; the earliest reported code wins ties."""
    counts = Counter(code for code in codes if code is not None)
    if not counts:
        return None
    # most_common is stable, so ties keep first-seen order
    return counts.most_common(1)[0][0]


def size_class(gross_tonnage: float | None, boundary: float = 10_000.0) -> SizeClass:
    if gross_tonnage is None:
        return SizeClass.UNKNOWN
    return SizeClass.GE10K if gross_tonnage >= boundary else SizeClass.LT10K
