"""
Unit tests for the stage wrapper and pipeline helpers
"""

import pytest

from app.core.config import load_settings
from app.core.exceptions import ConfigError, StageError
from app.services.base import BaseService, parallel_map
from app.services.pipeline_service import ActivityPipeline, derive_window
from tests.factories import pos


class _Stages(BaseService):
    def stage(self, name, action):
        return self._execute_with_handling(name, action)


def test_stage_success_is_recorded():
    service = _Stages()
    assert service.stage("ingest", lambda: 42) == 42
    assert service.stage_status["ingest"] == ("ok", None)


def test_pipeline_error_keeps_its_code():
    def fail():
        raise ConfigError("bad window")

    service = _Stages()
    with pytest.raises(StageError) as exc_info:
        service.stage("cases", fail)
    assert exc_info.value.stage == "cases"
    assert exc_info.value.code == "ConfigError"
    assert exc_info.value.message == "stage=cases: bad window"
    assert service.stage_status["cases"] == ("failed", "bad window")


def test_unexpected_error_becomes_stage_error():
    service = _Stages()
    with pytest.raises(StageError) as exc_info:
        service.stage("maps", lambda: 1 / 0)
    assert exc_info.value.code == "StageError"
    assert service.stage_status["maps"][0] == "failed"


def test_parallel_map_preserves_order():
    items = list(range(50))
    assert parallel_map(lambda x: x * x, items, threads=4) == [x * x for x in items]
    assert parallel_map(lambda x: x, [], threads=4) == []


def test_window_rounds_outwards_to_bins():
    per_vessel = {
        1: [pos(1, 1000, 57.0, 10.0), pos(1, 1500, 57.0, 10.0)],
        2: [pos(2, 250, 57.0, 10.0)],
    }
    assert derive_window(per_vessel, 240) == (240, 1680)


def test_window_single_instant_spans_one_bin():
    assert derive_window({1: [pos(1, 480, 57.0, 10.0)]}, 240) == (480, 720)
    assert derive_window({}, 240) is None


def test_missing_input_fails_ingest(tmp_path):
    pipeline = ActivityPipeline(load_settings())
    with pytest.raises(StageError) as exc_info:
        pipeline.run(tmp_path)
    assert exc_info.value.stage == "ingest"
    assert pipeline.stage_status["ingest"][0] == "failed"
    assert (tmp_path / "manifest.json").is_file()
