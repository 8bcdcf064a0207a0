"""
Unit tests for record sources
"""

import io
import json

import pytest

from app.core.exceptions import InputFormatError, SourceReadError
from app.ingest.reader import group_by_vessel, read_gross_tonnage, read_records
from app.models.record import RecordKind
from tests.factories import pos


def _line(**fields):
    return json.dumps(fields) + "\n"


def test_reads_json_lines_and_skips_malformed():
    text = (
        _line(kind="pos", mmsi=219000001, t=100, lat=57.1, lon=10.2, sog=3.5)
        + "not json\n"
        + _line(kind="static", mmsi=219000001, t=130, lat=57.1, lon=10.2, type=70, dest="AARHUS")
        + "\n"
        + _line(kind="pos", mmsi=219000002, t=140, lat=95.0, lon=10.2)
    )
    reader = read_records(io.StringIO(text))
    records = list(reader)
    assert [r.time for r in records] == [100, 130]
    assert records[1].kind is RecordKind.STATIC
    assert records[1].vessel_type == 70 and records[1].destination == "AARHUS"
    assert reader.stats.lines == 4
    assert reader.stats.malformed == 2


def test_reads_csv_with_empty_optionals():
    text = "kind,mmsi,t,lat,lon,sog,type,dest\npos,1,10,57.0,10.0,,,\nstatic,1,40,57.0,10.0,,52,SKAGEN\n"
    records = list(read_records(io.StringIO(text)))
    assert records[0].sog is None
    assert records[1].vessel_type == 52


def test_mostly_malformed_source_raises():
    text = "garbage\n" * 3 + _line(kind="pos", mmsi=1, t=1, lat=0.0, lon=0.0)
    with pytest.raises(InputFormatError):
        list(read_records(io.StringIO(text)))


def test_missing_file_raises(tmp_path):
    with pytest.raises(SourceReadError):
        read_records(tmp_path / "missing.jsonl")


def test_stream_gap_counted():
    text = _line(kind="pos", mmsi=1, t=0, lat=0.0, lon=0.0) + _line(
        kind="pos", mmsi=1, t=1000, lat=0.0, lon=0.0
    )
    reader = read_records(io.StringIO(text))
    list(reader)
    assert reader.stats.stream_gaps == 1
    assert reader.stats.largest_gap_s == 1000


def test_group_by_vessel_sorts_and_drops_replays():
    records = [pos(2, 50, 57.0, 10.0), pos(1, 20, 57.0, 10.0), pos(1, 10, 57.0, 10.0), pos(1, 20, 57.0, 10.0)]
    grouped, duplicates = group_by_vessel(records)
    assert list(grouped) == [1, 2]
    assert [r.time for r in grouped[1]] == [10, 20]
    assert duplicates == 1


def test_read_gross_tonnage(tmp_path):
    path = tmp_path / "gt.csv"
    path.write_text("mmsi,gross_tonnage\n219000001,12000\n219000002,oops\n")
    assert read_gross_tonnage(path) == {219000001: 12000.0}


def test_read_gross_tonnage_bad_header(tmp_path):
    path = tmp_path / "gt.csv"
    path.write_text("id,gt\n1,2\n")
    with pytest.raises(InputFormatError):
        read_gross_tonnage(path)
