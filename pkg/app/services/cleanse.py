"""
Message cleansing and movement segmentation

Steps run per vessel in this order: static-vessel removal, static-report
position correction, duplicate removal, segmentation (pass 1), outlier
removal, segmentation (pass 2), area filter, movement combining.
"""

from __future__ import annotations

import bisect
import dataclasses
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Mapping, Sequence

import numpy as np

from app.core.config import CleanseThresholds
from app.core.logging import get_logger, measure_latency
from app.geo.sphere import EARTH_RADIUS_M, KNOT_MS, distance_m, distance_m_array, intermediate_point
from app.ingest.areas import TransitArea, in_transit_area
from app.models.journey import Movement
from app.models.record import AisRecord
from app.schemas.report import CleanseReport
from app.services.base import parallel_map

logger = get_logger(__name__)

# Decides whether the gap between two record runs is an absence; such pairs are never merged.
AbsencePredicate = Callable[[Sequence[AisRecord], Sequence[AisRecord]], bool]


class SplitReason(str, Enum):
    SPEED = "speed"
    GAP = "gap"
    TRANSIT = "transit"


@dataclass
class Segmentation:
    movements: list[list[AisRecord]] = field(default_factory=list)
    stationary: list[AisRecord] = field(default_factory=list)
    singletons_removed: list[AisRecord] = field(default_factory=list)
    area_removed: list[AisRecord] = field(default_factory=list)


@dataclass
class OutlierResult:
    movements: list[list[AisRecord]] = field(default_factory=list)
    speed: list[AisRecord] = field(default_factory=list)
    acceleration: list[AisRecord] = field(default_factory=list)
    isolated: list[AisRecord] = field(default_factory=list)

    @property
    def rejected(self) -> list[AisRecord]:
        return [*self.speed, *self.acceleration, *self.isolated]


@dataclass(frozen=True)
class VesselCleanResult:
    mmsi: int
    movements: tuple[Movement, ...]
    stationary: tuple[AisRecord, ...]
    type_codes: tuple[int, ...]
    destinations: tuple[tuple[int, str], ...]
    report: CleanseReport
    rejected: tuple[AisRecord, ...]


@dataclass(frozen=True)
class CleanseResult:
    vessels: dict[int, VesselCleanResult]
    report: CleanseReport
    rejected: list[AisRecord]


def pair_speed_ms(a: AisRecord, b: AisRecord) -> float:
    """Speed implied by two records; simultaneous records are 0 if co-located, else infinite."""
    d = distance_m(a.pos, b.pos)
    dt = b.time - a.time
    if dt <= 0:
        return 0.0 if d == 0.0 else math.inf
    return d / dt


def _positions(records: Sequence[AisRecord]) -> tuple[np.ndarray, np.ndarray]:
    lats = np.fromiter((r.pos.lat for r in records), dtype=np.float64, count=len(records))
    lons = np.fromiter((r.pos.lon for r in records), dtype=np.float64, count=len(records))
    return lats, lons


def _pair_geometry(records: Sequence[AisRecord]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Distances (m), time steps (s) and speeds (m/s) between consecutive records."""
    lats, lons = _positions(records)
    dist = distance_m_array(lats[:-1], lons[:-1], lats[1:], lons[1:])
    times = np.fromiter((r.time for r in records), dtype=np.float64, count=len(records))
    dt = np.diff(times)
    with np.errstate(divide="ignore", invalid="ignore"):
        speed = np.where(dt > 0, dist / np.where(dt > 0, dt, 1.0), np.where(dist == 0, 0.0, np.inf))
    return dist, dt, speed


def fits_square(records: Sequence[AisRecord], side_m: float) -> bool:
    """Bounding box narrower than `side_m` in both directions, measured at its mean latitude."""
    if not records:
        return True
    lats, lons = _positions(records)
    meters_per_deg = EARTH_RADIUS_M * math.pi / 180.0
    height = (lats.max() - lats.min()) * meters_per_deg
    mean_lat = (lats.max() + lats.min()) / 2
    width = (lons.max() - lons.min()) * meters_per_deg * math.cos(math.radians(mean_lat))
    return bool(height < side_m and width < side_m)


def remove_static_vessels(
    per_vessel: Mapping[int, list[AisRecord]], side_m: float = 400.0
) -> tuple[dict[int, list[AisRecord]], list[int]]:
    """
    Drop vessels whose whole record set fits inside a `side_m` square

    Returns:
        (remaining vessels, removed MMSIs)
    """
    kept: dict[int, list[AisRecord]] = {}
    removed: list[int] = []
    for mmsi, records in per_vessel.items():
        if fits_square(records, side_m):
            removed.append(mmsi)
        else:
            kept[mmsi] = records
    return kept, removed


def correct_static_positions(records: Sequence[AisRecord]) -> tuple[list[AisRecord], int]:
    """
    Move static reports onto the great circle between their enclosing position reports

    Returns:
        (records, number of static reports repositioned)
    """
    positions = [r for r in records if not r.is_static]
    times = [r.time for r in positions]
    corrected = 0
    out: list[AisRecord] = []
    for record in records:
        if not record.is_static:
            out.append(record)
            continue
        hi = bisect.bisect_left(times, record.time)
        if hi < len(times) and times[hi] == record.time:
            before = after = positions[hi]
        elif 0 < hi < len(times):
            before, after = positions[hi - 1], positions[hi]
        else:
            out.append(record)
            continue
        if after.time == before.time:
            pos = before.pos
        else:
            fraction = (record.time - before.time) / (after.time - before.time)
            pos = intermediate_point(before.pos, after.pos, fraction)
        out.append(dataclasses.replace(record, pos=pos))
        corrected += 1
    return out, corrected


def remove_duplicates(
    records: Sequence[AisRecord], thresholds: CleanseThresholds | None = None
) -> tuple[list[AisRecord], list[AisRecord]]:
    """
    Drop high-rate reports that add no movement

    A record is dropped when, relative to the previous kept record, the time
    step, the implied speed and the distance are all below their limits.
    """
    t = thresholds or CleanseThresholds()
    max_speed_ms = t.duplicate_max_speed_kmh / 3.6
    kept: list[AisRecord] = []
    dropped: list[AisRecord] = []
    for record in records:
        if kept:
            prev = kept[-1]
            dt = record.time - prev.time
            d = distance_m(prev.pos, record.pos)
            if (
                dt < t.duplicate_max_dt_s
                and pair_speed_ms(prev, record) < max_speed_ms
                and d < t.duplicate_max_distance_m
            ):
                dropped.append(record)
                continue
        kept.append(record)
    return kept, dropped


def _split_reasons(
    records: Sequence[AisRecord], t: CleanseThresholds
) -> list[SplitReason | None]:
    if len(records) < 2:
        return []
    dist, dt, speed = _pair_geometry(records)
    reasons: list[SplitReason | None] = []
    for d, step, v in zip(dist, dt, speed):
        if step > t.max_gap_h * 3600 or d > t.max_jump_km * 1000:
            reasons.append(SplitReason.GAP)
        elif v < t.stationary_speed_kn * KNOT_MS:
            reasons.append(SplitReason.SPEED)
        else:
            reasons.append(None)
    return reasons


def _transit_cuts(run: Sequence[AisRecord], areas: tuple[TransitArea, ...]) -> list[int] | None:
    """
    Cut positions (index of the pair (k, k+1)) for tracks passing through transit areas

    Returns None when the whole run lies inside transit areas.
    """
    inside = [in_transit_area(r.pos, areas) is not None for r in run]
    if all(inside):
        return None
    cuts: list[int] = []
    k = 0
    while k < len(run):
        if not inside[k]:
            k += 1
            continue
        start = k
        while k < len(run) and inside[k]:
            k += 1
        end = k - 1
        if start > 0 and end < len(run) - 1:
            candidates = range(start - 1, end + 1)
            cuts.append(max(candidates, key=lambda j: (run[j + 1].time - run[j].time, -j)))
    return cuts


def segment_movements(
    records: Sequence[AisRecord],
    areas: tuple[TransitArea, ...],
    thresholds: CleanseThresholds | None = None,
) -> Segmentation:
    """
    Split a vessel's records into movements, stationary records and removals

    Splits fall between consecutive records on a low speed, a long time gap,
    a long jump, or at the largest time step of a transit-area passage.
    """
    t = thresholds or CleanseThresholds()
    result = Segmentation()
    if not records:
        return result
    reasons = _split_reasons(records, t)

    # boundaries[k] is the reason for the split before run k (None for the first)
    runs: list[list[AisRecord]] = [[records[0]]]
    boundaries: list[SplitReason | None] = [None]
    for record, reason in zip(records[1:], reasons):
        if reason is None:
            runs[-1].append(record)
        else:
            runs.append([record])
            boundaries.append(reason)
    boundaries.append(None)

    pieces: list[tuple[list[AisRecord], SplitReason | None, SplitReason | None]] = []
    for k, run in enumerate(runs):
        left, right = boundaries[k], boundaries[k + 1]
        if len(run) < 2:
            pieces.append((run, left, right))
            continue
        cuts = _transit_cuts(run, areas)
        if cuts is None:
            result.area_removed.extend(run)
            continue
        start = 0
        piece_left = left
        for cut in cuts:
            pieces.append((run[start : cut + 1], piece_left, SplitReason.TRANSIT))
            start, piece_left = cut + 1, SplitReason.TRANSIT
        pieces.append((run[start:], piece_left, right))

    for piece, left, right in pieces:
        if len(piece) >= 2:
            result.movements.append(piece)
        elif SplitReason.SPEED in (left, right):
            result.stationary.extend(piece)
        else:
            result.singletons_removed.extend(piece)
    return result


def _acceleration(records: Sequence[AisRecord]) -> np.ndarray:
    """Central-difference acceleration at interior records (length n - 2)."""
    _, _, speed = _pair_geometry(records)
    times = np.fromiter((r.time for r in records), dtype=np.float64, count=len(records))
    span = (times[2:] - times[:-2]) / 2
    dv = speed[1:] - speed[:-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        accel = np.where(span > 0, dv / np.where(span > 0, span, 1.0), np.where(dv == 0, 0.0, np.inf))
    return np.nan_to_num(accel, nan=np.inf)


def _acceleration_victims(magnitude: np.ndarray, limit: float) -> list[int]:
    """Local maxima among flagged interior records; never two neighbours at once."""
    flagged = magnitude > limit
    victims: list[int] = []
    for i in np.flatnonzero(flagged):
        left_ok = i == 0 or not flagged[i - 1] or magnitude[i] >= magnitude[i - 1]
        right_ok = i == len(magnitude) - 1 or not flagged[i + 1] or magnitude[i] > magnitude[i + 1]
        if left_ok and right_ok:
            victims.append(int(i) + 1)
    return victims


def _clean_movement(
    records: list[AisRecord], t: CleanseThresholds
) -> tuple[list[AisRecord], list[AisRecord], list[AisRecord]]:
    max_speed = t.max_speed_kn * KNOT_MS
    speed_out: list[AisRecord] = []
    accel_out: list[AisRecord] = []
    current = records
    while True:
        kept = [current[0]]
        for record in current[1:]:
            if pair_speed_ms(kept[-1], record) > max_speed:
                speed_out.append(record)
            else:
                kept.append(record)
        removed_now = len(kept) != len(current)
        if len(kept) >= 3:
            victims = set(_acceleration_victims(np.abs(_acceleration(kept)), t.max_accel_ms2))
            if victims:
                accel_out.extend(kept[i] for i in sorted(victims))
                kept = [r for i, r in enumerate(kept) if i not in victims]
                removed_now = True
        current = kept
        if not removed_now:
            return current, speed_out, accel_out


def remove_outliers(
    movements: Sequence[list[AisRecord]], thresholds: CleanseThresholds | None = None
) -> OutlierResult:
    """
    Iteratively drop speed and acceleration outliers until nothing changes

    Movements shrunk below two records are dropped; their remaining records
    count as isolated outliers.
    """
    t = thresholds or CleanseThresholds()
    result = OutlierResult()
    for movement in movements:
        kept, speed_out, accel_out = _clean_movement(list(movement), t)
        result.speed.extend(speed_out)
        result.acceleration.extend(accel_out)
        if len(kept) >= 2:
            result.movements.append(kept)
        else:
            result.isolated.extend(kept)
    return result


def area_filter_movements(
    movements: Sequence[list[AisRecord]], side_m: float = 400.0
) -> tuple[list[list[AisRecord]], list[AisRecord]]:
    """Movements fitting inside a `side_m` square become stationary records."""
    kept: list[list[AisRecord]] = []
    reclassified: list[AisRecord] = []
    for movement in movements:
        if fits_square(movement, side_m):
            reclassified.extend(movement)
        else:
            kept.append(movement)
    return kept, reclassified


def combine_movements(
    movements: Sequence[list[AisRecord]],
    gap_s: float = 120.0,
    is_absent: AbsencePredicate | None = None,
) -> tuple[list[list[AisRecord]], int, list[AisRecord]]:
    """
    Merge movements separated by at most `gap_s`, dropping the later one's first record

    Returns:
        (movements, number of merges, dropped records)
    """
    merged: list[list[AisRecord]] = []
    merges = 0
    dropped: list[AisRecord] = []
    for movement in movements:
        if merged:
            prev = merged[-1]
            gap = movement[0].time - prev[-1].time
            if gap <= gap_s and not (is_absent is not None and is_absent(prev, movement)):
                dropped.append(movement[0])
                prev.extend(movement[1:])
                merges += 1
                continue
        merged.append(list(movement))
    return merged, merges, dropped


def _destination_history(records: Sequence[AisRecord]) -> tuple[tuple[int, str], ...]:
    history: list[tuple[int, str]] = []
    for record in records:
        if record.destination and (not history or history[-1][1] != record.destination):
            history.append((record.time, record.destination))
    return tuple(history)


def cleanse_vessel(
    mmsi: int,
    records: Sequence[AisRecord],
    areas: tuple[TransitArea, ...],
    thresholds: CleanseThresholds | None = None,
    is_absent: AbsencePredicate | None = None,
) -> VesselCleanResult:
    """Full cleansing chain for one vessel's time-sorted records."""
    t = thresholds or CleanseThresholds()
    report = CleanseReport(input_records=len(records), input_vessels=1)
    type_codes = tuple(r.vessel_type for r in records if r.vessel_type is not None)
    destinations = _destination_history(records)

    if fits_square(records, t.static_square_m):
        report.static_vessels_removed = 1
        report.static_vessel_records_removed = len(records)
        return VesselCleanResult(mmsi, (), (), type_codes, destinations, report, ())

    corrected, report.positions_corrected = correct_static_positions(records)
    deduped, duplicates = remove_duplicates(corrected, t)
    report.duplicates_removed = len(duplicates)

    first = segment_movements(deduped, areas, t)
    report.movements_pass1 = len(first.movements)
    stationary = list(first.stationary)
    singletons = list(first.singletons_removed)
    area_removed = list(first.area_removed)

    outliers = remove_outliers(first.movements, t)
    report.outliers_speed = len(outliers.speed)
    report.outliers_acceleration = len(outliers.acceleration)
    report.outliers_isolated = len(outliers.isolated)

    second_pass: list[list[AisRecord]] = []
    for movement in outliers.movements:
        seg = segment_movements(movement, areas, t)
        second_pass.extend(seg.movements)
        stationary.extend(seg.stationary)
        singletons.extend(seg.singletons_removed)
        area_removed.extend(seg.area_removed)
    report.movements_pass2 = len(second_pass)

    kept, reclassified = area_filter_movements(second_pass, t.static_square_m)
    report.reclassified_stationary = len(reclassified)
    report.movements_reclassified = len(second_pass) - len(kept)
    stationary.extend(reclassified)

    combined, merges, merge_dropped = combine_movements(kept, t.combine_gap_s, is_absent)
    report.movements_merged = merges
    report.merge_records_dropped = len(merge_dropped)

    report.singletons_removed = len(singletons)
    report.area_segment_records_removed = len(area_removed)
    rejected = sorted(
        [*duplicates, *singletons, *area_removed, *outliers.rejected, *merge_dropped],
        key=lambda r: r.time,
    )

    if not combined:
        report.vessels_dropped = 1
        report.vessels_dropped_records = len(stationary)
        return VesselCleanResult(
            mmsi, (), (), type_codes, destinations, report, tuple(rejected)
        )

    stationary.sort(key=lambda r: r.time)
    report.movements_final = len(combined)
    report.kept_in_movements = sum(len(m) for m in combined)
    report.stationary_records = len(stationary)
    report.output_vessels = 1
    return VesselCleanResult(
        mmsi=mmsi,
        movements=tuple(Movement(mmsi, tuple(m)) for m in combined),
        stationary=tuple(stationary),
        type_codes=type_codes,
        destinations=destinations,
        report=report,
        rejected=tuple(rejected),
    )


@measure_latency("cleanse")
def run_cleanse(
    per_vessel: Mapping[int, list[AisRecord]],
    areas: tuple[TransitArea, ...],
    thresholds: CleanseThresholds | None = None,
    *,
    is_absent: AbsencePredicate | None = None,
    threads: int = 1,
) -> CleanseResult:
    """
    Cleanse every vessel independently and merge the reports

    Returns:
        Kept vessels (ascending MMSI), the merged report and the rejected-record sink
    """
    t = thresholds or CleanseThresholds()
    results = parallel_map(
        lambda item: cleanse_vessel(item[0], item[1], areas, t, is_absent),
        sorted(per_vessel.items()),
        threads,
    )
    report = CleanseReport()
    rejected: list[AisRecord] = []
    vessels: dict[int, VesselCleanResult] = {}
    for result in results:
        report = report.merge(result.report)
        rejected.extend(result.rejected)
        if result.movements:
            vessels[result.mmsi] = result
    rejected.sort(key=lambda r: (r.time, r.mmsi))

    logger.info(
        "cleanse_completed",
        input_records=report.input_records,
        kept_in_movements=report.kept_in_movements,
        stationary_records=report.stationary_records,
        removed_records=report.removed_records,
        movements=report.movements_final,
        vessels=report.output_vessels,
        conserved=report.is_conserved(),
    )
    return CleanseResult(vessels=vessels, report=report, rejected=rejected)
