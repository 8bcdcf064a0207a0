"""
End-to-end runs of the activity pipeline on generated corpora

The generator knows every vessel's schedule, so the run is checked against it:
1. movement count per vessel, exactly
2. stationary durations, within 120 s
3. the Skagerrak round trip as one absence with matching areas
4. per-bin moving/stationary counts in at least 99% of bins
"""

import json

import numpy as np
import pytest

from app.core.config import load_settings
from app.ingest.areas import SKAGERRAK
from app.output import writers
from app.schemas.synthetic import SyntheticTruth
from app.services.pipeline_service import ActivityPipeline
from app.services.synthetic import (
    COLLISION_MMSI,
    FIRST_MMSI,
    SyntheticSpec,
    truth_bin_states,
    write_corpus,
)
from app.services.uncertainty import rerun_rejected

pytestmark = pytest.mark.integration

STATIONARY_TOLERANCE_S = 120


# ============================================================================
# Fixtures
# ============================================================================


@pytest.fixture(scope="module")
def synthetic_run(tmp_path_factory):
    """Ten vessels over two days, noiseless, vessel 0 leaving via the Skagerrak."""
    root = tmp_path_factory.mktemp("synthetic")
    paths = write_corpus(root / "corpus", SyntheticSpec(n_vessels=10, days=2.0, seed=3))
    config = load_settings(paths.config, case="all")
    result = ActivityPipeline(config).run(root / "out")
    truth = SyntheticTruth.model_validate_json(paths.truth.read_text())
    return result, truth


def _total(series):
    return np.sum(list(series.values()), axis=0) if series else None


# ============================================================================
# Synthetic oracle
# ============================================================================


def test_movement_counts_recovered_exactly(synthetic_run):
    result, truth = synthetic_run
    for vessel in truth.vessels:
        recovered = result.cleansed.vessels[vessel.mmsi].movements
        assert len(recovered) == vessel.movements, vessel.mmsi


def test_stationary_durations_match(synthetic_run):
    result, truth = synthetic_run
    journeys = {journey.mmsi: journey for journey in result.reference.journeys}
    for vessel in truth.vessels:
        expected = [i.end - i.start for i in vessel.intervals if i.state == "stationary"]
        periods = journeys[vessel.mmsi].stationary_periods
        assert len(periods) == len(expected), vessel.mmsi
        for period, duration in zip(periods, expected):
            assert abs(period.duration - duration) <= STATIONARY_TOLERANCE_S


def test_skagerrak_round_trip_is_one_absence(synthetic_run):
    result, truth = synthetic_run
    journeys = {journey.mmsi: journey for journey in result.reference.journeys}
    (absence,) = journeys[FIRST_MMSI].absent_periods
    assert absence.exit_area == SKAGERRAK
    assert absence.entry_area == SKAGERRAK
    assert truth.vessels[0].exit_areas == [SKAGERRAK]
    for vessel in truth.vessels[1:]:
        assert journeys[vessel.mmsi].absent_periods == []


def test_bin_counts_match_ground_truth(synthetic_run):
    result, truth = synthetic_run
    timeline = result.reference.timeline
    moving, stationary = truth_bin_states(truth)
    offset = (timeline.start - truth.start) // truth.bin_s
    assert offset == 0
    n = min(timeline.n_bins, len(moving))
    assert n >= len(moving) - 1

    agree = (_total(timeline.moving)[:n] == moving[:n]) & (
        _total(timeline.stationary)[:n] == stationary[:n]
    )
    assert agree.mean() >= 0.99


def test_shuttle_journeys_identical_across_cases(synthetic_run):
    result, _ = synthetic_run
    moving = {case: _total(r.timeline.moving) for case, r in result.cases.items()}
    assert set(moving) == {"df", "low", "hi"}
    # Shuttles never leave the ROI; only the Skagerrak vessel may differ between cases.
    for journey_low, journey_hi in zip(result.cases["low"].journeys, result.cases["hi"].journeys):
        if journey_low.mmsi != FIRST_MMSI:
            assert journey_low.legs == journey_hi.legs


def test_all_outputs_listed_in_manifest(synthetic_run):
    result, _ = synthetic_run
    manifest = json.loads((result.out_dir / writers.MANIFEST_FILE).read_text())
    assert all(state["state"] == "ok" for state in manifest["stages"].values())
    assert writers.COUNTS_FILE in manifest["outputs"]
    assert writers.PORTS_GEOJSON_FILE in manifest["outputs"]
    assert "input" in manifest["inputs"]
    for name in manifest["outputs"]:
        assert (result.out_dir / name).is_file()


# ============================================================================
# Model accuracy, determinism, edge cases
# ============================================================================


def test_noiseless_model_is_exact(tmp_path):
    paths = write_corpus(tmp_path / "corpus", SyntheticSpec(n_vessels=3, days=1.0, skagerrak=False))
    config = load_settings(paths.config)
    result = ActivityPipeline(config).validate(tmp_path / "out")

    assert result.accuracy.records > 0
    assert result.accuracy.median_position_error_m < 1.0
    assert result.accuracy.median_time_offset_s < 1.0
    assert (tmp_path / "out" / writers.MODEL_ACCURACY_FILE).is_file()


def test_identical_input_gives_identical_bytes(tmp_path):
    paths = write_corpus(tmp_path / "corpus", SyntheticSpec(n_vessels=4, days=1.0, skagerrak=False))
    out = tmp_path / "out"

    def snapshot():
        return {path.name: path.read_bytes() for path in sorted(out.iterdir())}

    ActivityPipeline(load_settings(paths.config, case="all")).run(out)
    first = snapshot()
    ActivityPipeline(load_settings(paths.config, case="all", threads=4)).run(out)
    second = snapshot()
    ActivityPipeline(load_settings(paths.config, case="all", threads=4)).run(out)
    third = snapshot()

    assert first.keys() == second.keys() == third.keys()
    for name in first:
        if name != writers.MANIFEST_FILE:
            assert first[name] == second[name], name
    # same settings: the manifest repeats byte for byte
    assert third == second

    # the thread count is recorded; nothing else in the manifest moves with it
    one, four = (json.loads(s[writers.MANIFEST_FILE]) for s in (first, second))
    assert (one["effective_config"]["threads"], four["effective_config"]["threads"]) == (1, 4)
    assert one["config_hash"] != four["config_hash"]
    for manifest in (one, four):
        del manifest["effective_config"]["threads"], manifest["config_hash"]
    assert one == four


def test_collision_rerun_recovers_hidden_track(tmp_path):
    spec = SyntheticSpec(n_vessels=2, days=1.0, skagerrak=False, collision=True)
    paths = write_corpus(tmp_path / "corpus", spec)
    config = load_settings(paths.config)
    out = tmp_path / "out"
    result = ActivityPipeline(config).run(out)

    assert any(record.mmsi == COLLISION_MMSI for record in result.cleansed.rejected)
    report = rerun_rejected(out / writers.REJECTED_FILE, out / writers.TRAVEL_TIME_FILE, config)
    assert report.rejected_records > 0
    assert report.rejected_travel_days > 0
    assert report.ratio > 0


def test_empty_input_writes_empty_outputs(tmp_path):
    corpus = tmp_path / "empty.jsonl"
    corpus.write_text("")
    config = load_settings(
        input_path=corpus, roi_lat_min=57.0, roi_lat_max=58.0, roi_lon_min=10.0, roi_lon_max=11.0
    )
    result = ActivityPipeline(config).run(tmp_path / "out")

    assert result.window is None
    assert result.cases == {}
    assert result.ports == []
    assert (tmp_path / "out" / writers.COUNTS_FILE).is_file()
    manifest = json.loads((tmp_path / "out" / writers.MANIFEST_FILE).read_text())
    assert manifest["stages"]["ingest"]["state"] == "ok"
