"""
Synthetic record corpora with known ground truth

Vessels shuttle between a few mooring hubs in the Kattegat/Skagerrak corner
of a small ROI. Optionally one vessel leaves through the Skagerrak and comes
back, and one MMSI is shared by two vessels sailing in parallel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import numpy.typing as npt

from app.core.exceptions import ConfigError
from app.core.logging import get_logger
from app.geo.sphere import EARTH_RADIUS_M, KNOT_MS, distance_m, intermediate_point_array
from app.ingest.areas import SKAGERRAK
from app.models.record import AisRecord, GeoPoint, RecordKind
from app.schemas.record import RecordLine
from app.schemas.synthetic import SyntheticTruth, TruthInterval, VesselTruth

logger = get_logger(__name__)

# 2024-07-29 00:00 UTC, a multiple of the 240 s bin width
DEFAULT_START = 1_722_211_200
ROI = (57.0, 59.0, 9.0, 12.0)
HUBS: tuple[tuple[float, float], ...] = ((57.45, 10.45), (57.95, 10.95), (58.30, 10.30))

POSITION_STEP_S = 60
MOORING_STEP_S = 180
STATIC_STEP_S = 360
STATIC_PHASE_S = 30
BIN_S = 240
ABSENCE_S = 6 * 3600

_VESSEL_TYPES = (70, 80, 60, 52, 30, 35, 70, 80, 60, 70)
_GROSS_TONNAGE = (850.0, 4_200.0, 26_000.0, 61_000.0)
FIRST_MMSI = 219_000_001
COLLISION_MMSI = 219_000_999


@dataclass(frozen=True)
class SyntheticSpec:
    n_vessels: int = 10
    days: float = 2.0
    seed: int = 0
    jitter_m: float = 0.0
    skagerrak: bool = True
    collision: bool = False
    start: int = DEFAULT_START

    def __post_init__(self) -> None:
        if self.n_vessels < 1:
            raise ConfigError("a synthetic corpus needs at least one vessel")
        if self.days <= 0:
            raise ConfigError("a synthetic corpus needs a positive duration")
        if self.start % BIN_S:
            raise ConfigError(f"start must be a multiple of {BIN_S} s")

    @property
    def end(self) -> int:
        return self.start + max(1, round(self.days * 86_400 / BIN_S)) * BIN_S


@dataclass
class SyntheticCorpus:
    records: list[AisRecord]
    truth: SyntheticTruth
    gross_tonnage: dict[int, float] = field(default_factory=dict)


@dataclass
class _Track:
    """Records and truth of one vessel while its schedule is generated."""

    mmsi: int
    vessel_type: int | None
    records: list[AisRecord] = field(default_factory=list)
    intervals: list[TruthInterval] = field(default_factory=list)
    moorings: list[tuple[int, int, GeoPoint, str]] = field(default_factory=list)
    movements: int = 0
    absences: int = 0
    exit_areas: list[str] = field(default_factory=list)

    def moor(self, pos: GeoPoint, t0: int, t1: int, *, first: bool, last: bool, dest: str) -> None:
        begin = t0 if first else t0 + MOORING_STEP_S
        times = list(range(begin, t1 - POSITION_STEP_S + 1, MOORING_STEP_S))
        if last and (not times or times[-1] < t1):
            times.append(t1)
        self.records.extend(AisRecord(self.mmsi, t, pos, sog=0.0) for t in times)
        self.intervals.append(TruthInterval(state="stationary", start=t0, end=t1))
        self.moorings.append((t0, t1, pos, dest))

    def sail(self, a: GeoPoint, b: GeoPoint, t0: int, duration: int) -> list[AisRecord]:
        times = np.arange(t0, t0 + duration + 1, POSITION_STEP_S)
        lats, lons = intermediate_point_array(a.lat, a.lon, b.lat, b.lon, (times - t0) / duration)
        sog = distance_m(a, b) / duration / KNOT_MS
        records = [
            AisRecord(self.mmsi, int(t), GeoPoint(float(lat), float(lon)), sog=round(sog, 1))
            for t, lat, lon in zip(times, lats, lons)
        ]
        self.records.extend(records)
        return records

    def statics(self, start: int, end: int) -> None:
        """Static reports while moored, carrying type and destination."""
        for t in range(start + STATIC_PHASE_S, end, STATIC_STEP_S):
            for t0, t1, pos, dest in self.moorings:
                if t0 < t < t1:
                    self.records.append(
                        AisRecord(
                            self.mmsi,
                            t,
                            pos,
                            kind=RecordKind.STATIC,
                            vessel_type=self.vessel_type,
                            destination=dest,
                        )
                    )
                    break

    def truth(self) -> VesselTruth:
        return VesselTruth(
            mmsi=self.mmsi,
            vessel_type=self.vessel_type,
            movements=self.movements,
            absences=self.absences,
            exit_areas=self.exit_areas,
            intervals=self.intervals,
        )


def _offset(p: tuple[float, float], rng: np.random.Generator) -> GeoPoint:
    return GeoPoint(p[0] + rng.uniform(-0.002, 0.002), p[1] + rng.uniform(-0.004, 0.004))


def _sail_duration(a: GeoPoint, b: GeoPoint, rng: np.random.Generator) -> int:
    speed = rng.uniform(8.0, 14.0) * KNOT_MS
    return int(math.ceil(distance_m(a, b) / speed / POSITION_STEP_S)) * POSITION_STEP_S


def _shuttle(track: _Track, index: int, spec: SyntheticSpec, rng: np.random.Generator) -> None:
    hubs = (index % len(HUBS), (index + 1) % len(HUBS))
    moorings = [_offset(HUBS[h], rng) for h in hubs]
    here = 0
    t = spec.start
    first = True
    while True:
        t_dep = t + int(rng.integers(60, 480)) * 60
        duration = _sail_duration(moorings[here], moorings[1 - here], rng)
        if t_dep + duration + 3600 > spec.end:
            break
        track.moor(moorings[here], t, t_dep, first=first, last=False, dest=f"HUB{hubs[1 - here]}")
        track.sail(moorings[here], moorings[1 - here], t_dep, duration)
        track.intervals.append(TruthInterval(state="moving", start=t_dep, end=t_dep + duration))
        track.movements += 1
        first = False
        here = 1 - here
        t = t_dep + duration
    track.moor(moorings[here], t, spec.end, first=first, last=True, dest=f"HUB{hubs[here]}")


def _in_roi(p: GeoPoint) -> bool:
    return ROI[0] <= p.lat <= ROI[1] and ROI[2] <= p.lon <= ROI[3]


def _skagerrak_round_trip(track: _Track, spec: SyntheticSpec, rng: np.random.Generator) -> None:
    """Leave westwards along 57.5N, stay out of the ROI, come back along 57.9N."""
    home = _offset(HUBS[0], rng)
    away = _offset(HUBS[1], rng)
    out_end = GeoPoint(57.5, 8.8)
    back_start = GeoPoint(57.9, 8.8)

    t_dep = spec.start + int(rng.integers(60, 180)) * 60
    track.moor(home, spec.start, t_dep, first=True, last=False, dest="SKAGEN")
    out = track.sail(home, out_end, t_dep, _sail_duration(home, out_end, rng))
    last_in = max(r.time for r in out if _in_roi(r.pos))

    t_back = out[-1].time + ABSENCE_S
    back_duration = _sail_duration(back_start, away, rng)
    back = track.sail(back_start, away, t_back, back_duration)
    first_in = min(r.time for r in back if _in_roi(r.pos))
    t_arr = t_back + back_duration
    if t_arr + 3600 > spec.end:
        raise ConfigError("synthetic period too short for the Skagerrak round trip")
    track.moor(away, t_arr, spec.end, first=False, last=True, dest="HUB1")

    track.intervals[1:1] = [
        TruthInterval(state="moving", start=t_dep, end=last_in),
        TruthInterval(state="absent", start=last_in, end=first_in),
        TruthInterval(state="moving", start=first_in, end=t_arr),
    ]
    track.movements += 2
    track.absences += 1
    track.exit_areas.append(SKAGERRAK)


def _collision_pair(spec: SyntheticSpec, rng: np.random.Generator) -> tuple[_Track, int]:
    """Two vessels on one MMSI, 20 km apart, reporting 30 s out of phase."""
    track = _Track(COLLISION_MMSI, None)
    t0 = spec.start + 3600
    a0, a1 = GeoPoint(57.30, 10.1), GeoPoint(57.30, 11.4)
    b0, b1 = GeoPoint(57.48, 10.1), GeoPoint(57.48, 11.4)
    duration = _sail_duration(a0, a1, rng)
    if t0 + duration > spec.end:
        raise ConfigError("synthetic period too short for the collision pair")
    track.sail(a0, a1, t0, duration)
    hidden = _Track(COLLISION_MMSI, None)
    hidden.sail(b0, b1, t0 + 30, duration)
    track.records.extend(hidden.records)
    track.intervals.append(TruthInterval(state="moving", start=t0, end=t0 + duration))
    track.movements = 1
    return track, duration


def _jitter(records: list[AisRecord], jitter_m: float, rng: np.random.Generator) -> list[AisRecord]:
    if jitter_m <= 0:
        return records
    out = []
    for r in records:
        if r.kind is RecordKind.STATIC:
            out.append(r)
            continue
        dlat = math.degrees(rng.normal(0.0, jitter_m) / EARTH_RADIUS_M)
        dlon = math.degrees(rng.normal(0.0, jitter_m) / EARTH_RADIUS_M) / math.cos(
            math.radians(r.pos.lat)
        )
        out.append(
            AisRecord(r.mmsi, r.time, GeoPoint(r.pos.lat + dlat, r.pos.lon + dlon), r.kind, r.sog)
        )
    return out


def generate(spec: SyntheticSpec | None = None) -> SyntheticCorpus:
    """Build a corpus and its ground truth; identical specs give identical corpora."""
    spec = spec or SyntheticSpec()
    rng = np.random.default_rng(spec.seed)
    tracks: list[_Track] = []
    gross_tonnage: dict[int, float] = {}
    for i in range(spec.n_vessels):
        track = _Track(FIRST_MMSI + i, _VESSEL_TYPES[i % len(_VESSEL_TYPES)])
        if i == 0 and spec.skagerrak:
            _skagerrak_round_trip(track, spec, rng)
        else:
            _shuttle(track, i, spec, rng)
        track.statics(spec.start, spec.end)
        tracks.append(track)
        gross_tonnage[track.mmsi] = _GROSS_TONNAGE[i % len(_GROSS_TONNAGE)]

    hidden_s = 0
    if spec.collision:
        pair, hidden_s = _collision_pair(spec, rng)
        tracks.append(pair)

    records = [r for track in tracks for r in _jitter(track.records, spec.jitter_m, rng)]
    records.sort(key=lambda r: (r.time, r.mmsi, r.pos.lat))
    truth = SyntheticTruth(
        seed=spec.seed,
        start=spec.start,
        end=spec.end,
        bin_s=BIN_S,
        hubs=list(HUBS),
        vessels=[track.truth() for track in tracks],
        collision_mmsi=COLLISION_MMSI if spec.collision else None,
        collision_hidden_s=hidden_s,
    )
    return SyntheticCorpus(records, truth, gross_tonnage)


def truth_bin_states(
    truth: SyntheticTruth,
) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.int64]]:
    """Moving and stationary vessels per bin; a vessel moving at any time in a bin counts as moving."""
    n_bins = math.ceil((truth.end - truth.start) / truth.bin_s)
    moving = np.zeros(n_bins, dtype=np.int64)
    stationary = np.zeros(n_bins, dtype=np.int64)
    for vessel in truth.vessels:
        if vessel.movements == 0:
            continue
        states = np.zeros(n_bins, dtype=np.int8)
        for interval in vessel.intervals:
            if interval.state == "absent":
                continue
            lo = (interval.start - truth.start) // truth.bin_s
            hi = lo if interval.end == interval.start else -(-(interval.end - truth.start) // truth.bin_s) - 1
            lo, hi = max(lo, 0), min(hi, n_bins - 1)
            value = 2 if interval.state == "moving" else 1
            np.maximum(states[lo : hi + 1], value, out=states[lo : hi + 1])
        moving += states == 2
        stationary += states == 1
    return moving, stationary


@dataclass(frozen=True)
class SyntheticPaths:
    corpus: Path
    truth: Path
    gross_tonnage: Path
    config: Path


def write_corpus(out_dir: Path | str, spec: SyntheticSpec | None = None) -> SyntheticPaths:
    """
    Write corpus.jsonl, truth.json, gross_tonnage.csv and a matching synthetic.env

    The env file points the pipeline at the corpus and shrinks the ROI and
    the central averaging window to the synthetic period.
    """
    spec = spec or SyntheticSpec()
    corpus = generate(spec)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = SyntheticPaths(
        corpus=out / "corpus.jsonl",
        truth=out / "truth.json",
        gross_tonnage=out / "gross_tonnage.csv",
        config=out / "synthetic.env",
    )
    with paths.corpus.open("w", encoding="utf-8", newline="\n") as handle:
        for record in corpus.records:
            handle.write(RecordLine.from_record(record).to_line() + "\n")
    paths.truth.write_text(corpus.truth.model_dump_json(indent=2) + "\n", encoding="utf-8")
    with paths.gross_tonnage.open("w", encoding="utf-8", newline="\n") as handle:
        handle.write("mmsi,gross_tonnage\n")
        for mmsi, gt in sorted(corpus.gross_tonnage.items()):
            handle.write(f"{mmsi},{gt}\n")

    window_days = min(1.0, (spec.end - spec.start) / 86_400 / 2)
    settings_lines = [
        f"INPUT_PATH={paths.corpus.resolve()}",
        f"GROSS_TONNAGE_PATH={paths.gross_tonnage.resolve()}",
        f"ROI_LAT_MIN={ROI[0]}",
        f"ROI_LAT_MAX={ROI[1]}",
        f"ROI_LON_MIN={ROI[2]}",
        f"ROI_LON_MAX={ROI[3]}",
        f"METRICS__STATIONARY_WINDOW_DAYS={window_days}",
    ]
    paths.config.write_text("\n".join(settings_lines) + "\n", encoding="utf-8")
    logger.info(
        "synthetic_corpus_written",
        out_dir=str(out),
        seed=spec.seed,
        vessels=len(corpus.truth.vessels),
        records=len(corpus.records),
    )
    return paths
