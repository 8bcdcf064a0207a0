"""
Unit tests for settings loading
"""

from datetime import datetime, timezone

import pytest

from app.core.config import Settings, load_settings
from app.core.exceptions import ConfigError


def test_defaults():
    config = Settings()
    assert config.metrics.bin_s == 240
    assert config.ports.threshold == 0.5
    assert config.cases == ["df", "low", "hi"]
    assert config.analysis_window is None


def test_load_settings_from_file_with_nested_keys(tmp_path):
    path = tmp_path / "run.env"
    path.write_text(
        "ROI_LAT_MIN=57\nROI_LAT_MAX=59\nMETRICS__BIN_S=120\nCASE=low\n"
        "ANALYSIS_START=2024-07-29T00:00:00Z\nANALYSIS_END=2024-07-30T00:00:00Z\n"
    )
    config = load_settings(path)
    assert config.roi_lat_min == 57.0
    assert config.metrics.bin_s == 120
    assert config.cases == ["low"]
    start = int(datetime(2024, 7, 29, tzinfo=timezone.utc).timestamp())
    assert config.analysis_window == (start, start + 86_400)


def test_overrides_win_and_none_is_ignored(tmp_path):
    path = tmp_path / "run.env"
    path.write_text("THREADS=2\n")
    config = load_settings(path, threads=4, case=None)
    assert config.threads == 4
    assert config.case == "all"


def test_missing_file_raises(tmp_path):
    with pytest.raises(ConfigError):
        load_settings(tmp_path / "absent.env")


@pytest.mark.parametrize(
    "overrides",
    [
        {"roi_lat_min": 60.0, "roi_lat_max": 59.0},
        {"threads": 0},
        {"case": "worst"},
        {"uncertainty": {"delta_dark": {"ALL": 1.0}}},
    ],
)
def test_invalid_values_raise(overrides):
    with pytest.raises(ConfigError):
        load_settings(None, **overrides)


def test_config_hash_tracks_values():
    assert Settings().config_hash == Settings().config_hash
    assert Settings(threads=3).config_hash != Settings().config_hash
