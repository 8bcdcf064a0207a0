"""
Unit tests for transit areas
"""

import pytest

from app.core.exceptions import ValidationError
from app.ingest.areas import (
    KIEL_CANAL,
    SKAGERRAK,
    AreaVariant,
    Box,
    in_transit_area,
    kiel_zone,
    transit_areas,
)
from app.models.record import GeoPoint


def test_eleven_areas_in_table_order():
    names = [area.name for area in transit_areas()]
    assert len(names) == 11
    assert names[:2] == [SKAGERRAK, KIEL_CANAL]


def test_variants_only_move_the_eastern_edge():
    point = GeoPoint(57.5, 9.07)
    assert in_transit_area(point, variant=AreaVariant.SMALL) is None
    assert in_transit_area(point, variant=AreaVariant.DEFAULT) is None
    assert in_transit_area(point, variant=AreaVariant.LARGE) == SKAGERRAK


def test_two_box_area():
    assert in_transit_area(GeoPoint(57.70, 11.95)) == "Vänern Lake"
    assert in_transit_area(GeoPoint(57.78, 11.85)) == "Vänern Lake"


def test_point_outside_every_area():
    assert in_transit_area(GeoPoint(55.0, 15.0)) is None


def test_box_edges_are_closed():
    box = Box(0.0, 1.0, 0.0, 1.0)
    assert box.contains(GeoPoint(1.0, 1.0))
    with pytest.raises(ValidationError):
        Box(1.0, 1.0, 0.0, 1.0)


def test_kiel_zone_grows_by_cells():
    zone = kiel_zone(transit_areas(), dlat=0.01, dlon=0.02, cells=1)
    assert zone.lat_min == pytest.approx(54.3536)
    assert zone.lon_max == pytest.approx(10.170)
