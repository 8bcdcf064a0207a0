"""
Output writers: CSV tables, Esri ASCII rasters, GeoJSON, JSON reports

Everything written here is a pure function of its arguments; no timestamps,
no unordered iteration.
"""

from __future__ import annotations

import csv
import hashlib
import json
from enum import Enum
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np
import numpy.typing as npt
from shapely.geometry import box, mapping
from shapely.ops import unary_union

from app.geo.esri import write_ascii_grid
from app.geo.grid import GridSpec
from app.models.journey import Journey
from app.models.port import PortArea
from app.models.record import AisRecord
from app.schemas.base import BaseSchema
from app.schemas.journey import JourneyLine
from app.schemas.metrics import AverageRow, CycleSummary, DailyCycleRow, UncertaintyRow
from app.schemas.record import RecordLine
from app.services.metrics import CountTimeline
from app.services.trajectory import SpeedComparisonRow

COUNTS_FILE = "counts.csv"
AVERAGES_FILE = "averages.csv"
DAILY_CYCLE_FILE = "daily_cycle.csv"
DAILY_CYCLE_SUMMARY_FILE = "daily_cycle_summary.csv"
UNCERTAINTY_FILE = "uncertainty.csv"
MODEL_ACCURACY_FILE = "model_accuracy.csv"
SPEED_COMPARISON_FILE = "speed_comparison.csv"
PORTS_CSV_FILE = "ports.csv"
PORTS_GEOJSON_FILE = "ports.geojson"
CLEANSE_REPORT_FILE = "cleanse_report.json"
REJECTED_FILE = "rejected.jsonl"
REJECTED_REPORT_FILE = "rejected_report.json"
TRAJECTORIES_FILE = "trajectories.jsonl"
TRAVEL_TIME_FILE = "travel_time.json"
MANIFEST_FILE = "manifest.json"

RASTER_NODATA = -9999.0
REPORTED_PACKAGES = (
    "numpy",
    "scipy",
    "scikit-image",
    "shapely",
    "pydantic",
    "pydantic-settings",
    "structlog",
)


def _fmt(value: Any) -> Any:
    if isinstance(value, float):
        return f"{value:.10g}"
    if value is None:
        return ""
    return value


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(value) for value in row])
    return path


def write_schema_rows(path: Path, rows: Sequence[BaseSchema], schema: type[BaseSchema]) -> Path:
    """One CSV row per schema instance, columns in field order."""
    header = list(schema.model_fields)
    return write_csv(
        path, header, ([_plain(getattr(row, name)) for name in header] for row in rows)
    )


def _plain(value: Any) -> Any:
    return value.value if isinstance(value, Enum) else value


def write_json(path: Path, model: BaseSchema) -> Path:
    path.write_text(model.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


def write_counts(path: Path, timelines: Mapping[str, CountTimeline]) -> Path:
    """Per-bin totals for every case."""
    rows: list[list[Any]] = []
    for case, timeline in timelines.items():
        moving = timeline.state("moving")
        stationary = timeline.state("stationary")
        entries = timeline.events("entries")
        exits = timeline.events("exits")
        for k, start in enumerate(timeline.bin_starts()):
            rows.append(
                [case, int(start), int(moving[k]), int(stationary[k]), int(entries[k]), int(exits[k])]
            )
    return write_csv(path, ["case", "bin_start", "moving", "stationary", "entries", "exits"], rows)


def write_averages(path: Path, averages: Mapping[str, Sequence[AverageRow]]) -> Path:
    header = ["case", *AverageRow.model_fields]
    rows = (
        [case, *(_plain(getattr(row, name)) for name in AverageRow.model_fields)]
        for case, case_rows in averages.items()
        for row in case_rows
    )
    return write_csv(path, header, rows)


def write_daily_cycle(
    out_dir: Path, rows: Sequence[DailyCycleRow], summaries: Sequence[CycleSummary]
) -> list[Path]:
    return [
        write_schema_rows(out_dir / DAILY_CYCLE_FILE, rows, DailyCycleRow),
        write_schema_rows(out_dir / DAILY_CYCLE_SUMMARY_FILE, summaries, CycleSummary),
    ]


def write_uncertainty(path: Path, rows: Sequence[UncertaintyRow]) -> Path:
    return write_schema_rows(path, rows, UncertaintyRow)


def write_speed_comparison(path: Path, rows: Sequence[SpeedComparisonRow]) -> Path:
    return write_csv(
        path,
        ["bin_kmh", "records", "mean_reported_kmh", "mean_inferred_kmh", "mean_model_kmh"],
        (
            [r.bin_kmh, r.records, r.mean_reported_kmh, r.mean_inferred_kmh, r.mean_model_kmh]
            for r in rows
        ),
    )


def write_model_accuracy(path: Path, report: BaseSchema) -> Path:
    """Two-column metric/value table."""
    return write_csv(path, ["metric", "value"], report.model_dump().items())


def write_rasters(
    out_dir: Path, layers: Mapping[str, npt.NDArray[np.float64]], grid: GridSpec
) -> list[Path]:
    paths = []
    for name, data in layers.items():
        path = out_dir / f"{name}.asc"
        write_ascii_grid(
            path, data, grid.lon_min, grid.lat_min, grid.dlon, grid.dphi, RASTER_NODATA
        )
        paths.append(path)
    return paths


def write_ports_csv(path: Path, ports: Sequence[PortArea]) -> Path:
    return write_csv(
        path,
        [
            "id",
            "lat",
            "lon",
            "area_km2",
            "n_cells",
            "vessels_in_port",
            "vessels_per_km2",
            "arrivals_per_day",
            "top_destination",
            "coast_distance_km",
        ],
        (
            [
                p.id,
                p.barycenter.lat,
                p.barycenter.lon,
                p.area_km2,
                p.n_cells,
                p.vessels_in_port,
                p.vessels_in_port / p.area_km2 if p.area_km2 > 0 else 0.0,
                p.arrivals_per_day,
                p.top_destination,
                p.coast_distance_km,
            ]
            for p in ports
        ),
    )


def port_polygon(port: PortArea, grid: GridSpec):
    """Union of the port's cell rectangles in (lon, lat)."""
    cells = []
    for row, col in port.cells:
        lon0 = grid.lon_min + col * grid.dlon
        lat0 = grid.lat_min + row * grid.dphi
        cells.append(box(lon0, lat0, lon0 + grid.dlon, lat0 + grid.dphi))
    return unary_union(cells)


def write_ports_geojson(path: Path, ports: Sequence[PortArea], grid: GridSpec) -> Path:
    features = [
        {
            "type": "Feature",
            "geometry": mapping(port_polygon(port, grid)),
            "properties": {
                "id": port.id,
                "barycenter": [port.barycenter.lon, port.barycenter.lat],
                "area_km2": port.area_km2,
                "vessels_in_port": port.vessels_in_port,
                "arrivals_per_day": port.arrivals_per_day,
                "top_destination": port.top_destination,
                "coast_distance_km": port.coast_distance_km,
            },
        }
        for port in ports
    ]
    collection = {"type": "FeatureCollection", "features": features}
    path.write_text(json.dumps(collection, sort_keys=True, indent=1) + "\n", encoding="utf-8")
    return path


def write_records(path: Path, records: Iterable[AisRecord]) -> Path:
    """Records in the input line-JSON schema (the rejected-record sink)."""
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        for record in records:
            handle.write(RecordLine.from_record(record).to_line() + "\n")
    return path


def write_journeys(path: Path, journeys: Iterable[Journey]) -> Path:
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        for journey in journeys:
            handle.write(JourneyLine.from_journey(journey).to_line() + "\n")
    return path


def sha256_file(path: Path | str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def package_versions(names: Sequence[str] = REPORTED_PACKAGES) -> dict[str, str]:
    versions = {}
    for name in names:
        try:
            versions[name] = version(name)
        except PackageNotFoundError:
            versions[name] = "unknown"
    return versions
