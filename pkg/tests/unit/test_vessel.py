"""
Unit tests for vessel categories, size classes and record invariants
"""

import pytest

from app.core.exceptions import InvalidCodeError, ValidationError
from app.models.record import AisRecord, GeoPoint, format_mmsi
from app.models.vessel import (
    SizeClass,
    VesselCategory,
    categorize,
    dominant_vessel_type,
    size_class,
)


@pytest.mark.parametrize(
    "code, expected",
    [
        (20, VesselCategory.PASSENGER_HIGH_SPEED),
        (60, VesselCategory.PASSENGER_HIGH_SPEED),
        (35, VesselCategory.LAW_ENFORCEMENT_MILITARY),
        (55, VesselCategory.LAW_ENFORCEMENT_MILITARY),
        (70, VesselCategory.CARGO),
        (79, VesselCategory.CARGO),
        (52, VesselCategory.PILOT_TUG_RESCUE_DIVING),
        (21, VesselCategory.PILOT_TUG_RESCUE_DIVING),
        (84, VesselCategory.TANKER),
        (30, VesselCategory.OTHERS_INCLUDING_FISHING),
        (0, VesselCategory.OTHERS_INCLUDING_FISHING),
        (99, VesselCategory.OTHERS_INCLUDING_FISHING),
    ],
)
def test_categorize(code, expected):
    assert categorize(code) is expected


def test_categorize_missing_code_is_other():
    assert categorize(None) is VesselCategory.OTHERS_INCLUDING_FISHING


@pytest.mark.parametrize("code", [-1, 100])
def test_categorize_rejects_out_of_range(code):
    with pytest.raises(InvalidCodeError):
        categorize(code)


def test_dominant_type_prefers_most_frequent_then_first_seen():
    assert dominant_vessel_type([70, 80, 80, None]) == 80
    assert dominant_vessel_type([52, 70, 70, 52]) == 52
    assert dominant_vessel_type([None, None]) is None


def test_size_class_boundary():
    assert size_class(None) is SizeClass.UNKNOWN
    assert size_class(9_999.9) is SizeClass.LT10K
    assert size_class(10_000.0) is SizeClass.GE10K


def test_geopoint_normalizes_longitude():
    assert GeoPoint(10.0, 190.0).lon == pytest.approx(-170.0)
    assert GeoPoint(10.0, 180.0).lon == -180.0


def test_geopoint_rejects_bad_latitude():
    with pytest.raises(ValidationError):
        GeoPoint(91.0, 0.0)


def test_record_invariants():
    pos = GeoPoint(57.0, 10.0)
    with pytest.raises(ValidationError):
        AisRecord(mmsi=2**32, time=0, pos=pos)
    with pytest.raises(ValidationError):
        AisRecord(mmsi=1, time=-1, pos=pos)
    with pytest.raises(ValidationError):
        AisRecord(mmsi=1, time=0, pos=pos, sog=-0.1)


def test_format_mmsi_pads_to_nine_digits():
    assert format_mmsi(2190001) == "002190001"
