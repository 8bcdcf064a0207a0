"""
Unit tests for the region-of-interest filter
"""

from app.core.config import Settings
from app.ingest.roi import RoiSpec, filter_roi
from tests.factories import pos


def test_filter_drops_outside_window_and_land(island_mask):
    roi = RoiSpec(lat_min=57.0, lat_max=58.0, lon_min=10.0, lon_max=11.0, land_mask=island_mask)
    records = [
        pos(1, 10, 57.1, 10.1),
        pos(1, 20, 56.5, 10.1),  # outside
        pos(1, 30, 57.5, 10.5),  # land
        pos(1, 40, 57.2, 10.2),
        pos(1, 9_999, 57.2, 10.2),  # after window
    ]
    kept = list(filter_roi(records, roi, window=(0, 1_000)))
    assert [r.time for r in kept] == [10, 40]


def test_utc_offset_assigned_by_longitude():
    roi = RoiSpec()
    kept = list(filter_roi([pos(1, 0, 55.0, 15.0), pos(2, 0, 60.0, 25.0)], roi))
    assert [r.utc_offset for r in kept] == [1, 2]


def test_from_settings_uses_configured_box():
    roi = RoiSpec.from_settings(
        Settings(roi_lat_min=57.0, roi_lat_max=59.0, roi_lon_min=9.0, roi_lon_max=12.0)
    )
    assert (roi.lat_min, roi.lon_max) == (57.0, 12.0)
    assert roi.grid().shape == (480, 360)
