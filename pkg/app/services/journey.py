"""
Journey assembly: gap classification into stationary and absent periods
"""

from __future__ import annotations

import bisect
import dataclasses
import math
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

from app.core.config import CaseName, JourneyThresholds
from app.core.exceptions import ConsistencyError
from app.core.logging import get_logger, measure_latency
from app.geo.grid import ARCSEC_DEG
from app.geo.sphere import KNOT_MS, distance_m, midpoint
from app.ingest.areas import (
    KIEL_CANAL,
    MEMBERSHIP_AREAS,
    AreaVariant,
    Box,
    TransitArea,
    in_transit_area,
    kiel_zone,
    transit_areas,
)
from app.models.journey import AbsentPeriod, Journey, Leg, StationaryPeriod
from app.models.record import AisRecord, GeoPoint
from app.models.trajectory import Trajectory
from app.models.vessel import categorize, dominant_vessel_type
from app.services.base import parallel_map
from app.services.cleanse import AbsencePredicate, VesselCleanResult, pair_speed_ms

logger = get_logger(__name__)

# Reference speed of the transit-time threshold.
REFERENCE_SPEED_KN = 10.0
# More received records than this inside a gap mean the vessel stayed.
MAX_GAP_RECORDS = 3

_CASE_VARIANT: dict[str, AreaVariant] = {
    "low": AreaVariant.LARGE,
    "df": AreaVariant.DEFAULT,
    "hi": AreaVariant.SMALL,
}


@dataclass(frozen=True)
class TransitPolicy:
    """
    Gap classification parameters for one analysis case

    Attributes:
        t0_h: transit-time scale at the reference speed
        variant: Skagerrak / Kiel Canal area size
        kiel_idle_h: idle time in the Kiel zone that counts as absent
        kiel_buffer_cells: grid cells added around the Kiel Canal area
    """

    case: CaseName
    t0_h: float = 6.0
    variant: AreaVariant = AreaVariant.DEFAULT
    kiel_idle_h: float = 24.0
    kiel_buffer_cells: int = 1
    resolved_idle_distance_m: float = 1000.0
    dphi: float = 15 * ARCSEC_DEG
    dlon: float = 30 * ARCSEC_DEG

    def __post_init__(self) -> None:
        if self.t0_h <= 0:
            raise ValueError("t0 must be positive")

    @classmethod
    def for_case(
        cls,
        case: CaseName,
        thresholds: JourneyThresholds | None = None,
        dphi: float = 15 * ARCSEC_DEG,
        dlon: float = 30 * ARCSEC_DEG,
    ) -> TransitPolicy:
        t = thresholds or JourneyThresholds()
        return cls(
            case=case,
            t0_h=t.t0_low_h if case == "low" else t.t0_h,
            variant=_CASE_VARIANT[case],
            kiel_idle_h=t.kiel_idle_h,
            kiel_buffer_cells=t.kiel_buffer_cells,
            resolved_idle_distance_m=t.resolved_idle_distance_m,
            dphi=dphi,
            dlon=dlon,
        )

    @cached_property
    def areas(self) -> tuple[TransitArea, ...]:
        return transit_areas(self.variant)

    @cached_property
    def kiel_box(self) -> Box:
        return kiel_zone(self.areas, self.dphi, self.dlon, self.kiel_buffer_cells)


def transit_time_threshold(v_exit_kn: float, v_entry_kn: float, t0_h: float = 6.0) -> float:
    """
    Longest gap (hours) still compatible with staying inside the ROI at these speeds

    Both speeds zero yields infinity: such a gap is never flagged by this rule.
    """
    v = max(v_exit_kn, v_entry_kn)
    if v <= 0:
        return math.inf
    return t0_h * (v / REFERENCE_SPEED_KN) ** -4


@dataclass(frozen=True)
class GapDecision:
    absent: bool
    exit_area: str | None
    entry_area: str | None


def decide_gap(
    exit_pos: GeoPoint,
    entry_pos: GeoPoint,
    gap_s: float,
    v_exit_kn: float,
    v_entry_kn: float,
    records_in_gap: int,
    policy: TransitPolicy,
) -> GapDecision:
    """
    Stationary or absent, evaluated in order: Kiel idling, area membership,
    received records, Skagerrak/Kiel membership, transit-time threshold
    """
    exit_area = in_transit_area(exit_pos, policy.areas)
    entry_area = in_transit_area(entry_pos, policy.areas)
    kiel_exit = policy.kiel_box.contains(exit_pos)
    kiel_entry = policy.kiel_box.contains(entry_pos)

    if (kiel_exit or kiel_entry) and gap_s > policy.kiel_idle_h * 3600:
        return GapDecision(
            True,
            exit_area or (KIEL_CANAL if kiel_exit else None),
            entry_area or (KIEL_CANAL if kiel_entry else None),
        )
    if exit_area is None and entry_area is None:
        return GapDecision(False, None, None)
    if records_in_gap > MAX_GAP_RECORDS:
        return GapDecision(False, exit_area, entry_area)
    if exit_area in MEMBERSHIP_AREAS or entry_area in MEMBERSHIP_AREAS:
        return GapDecision(True, exit_area, entry_area)
    threshold_s = transit_time_threshold(v_exit_kn, v_entry_kn, policy.t0_h) * 3600
    return GapDecision(gap_s > threshold_s, exit_area, entry_area)


def classify_gap(
    prev_leg: Trajectory,
    next_leg: Trajectory,
    records_in_gap: int,
    policy: TransitPolicy,
) -> StationaryPeriod | AbsentPeriod:
    """Period filling the gap between two consecutive trajectories of a vessel."""
    exit_pos, entry_pos = prev_leg.route.end, next_leg.route.start
    decision = decide_gap(
        exit_pos,
        entry_pos,
        next_leg.start_time - prev_leg.end_time,
        prev_leg.exit_speed / KNOT_MS,
        next_leg.entry_speed / KNOT_MS,
        records_in_gap,
        policy,
    )
    if decision.absent:
        return AbsentPeriod(
            mmsi=prev_leg.mmsi,
            start_time=prev_leg.end_time,
            end_time=next_leg.start_time,
            exit_area=decision.exit_area,
            entry_area=decision.entry_area,
        )
    return _stationary(
        prev_leg.mmsi, prev_leg.end_time, next_leg.start_time, exit_pos, entry_pos, policy
    )


def _stationary(
    mmsi: int, start: int, end: int, a: GeoPoint, b: GeoPoint, policy: TransitPolicy
) -> StationaryPeriod:
    return StationaryPeriod(
        mmsi=mmsi,
        start_time=start,
        end_time=end,
        idle_pos=midpoint(a, b),
        position_resolved=distance_m(a, b) <= policy.resolved_idle_distance_m,
    )


def absence_predicate(policy: TransitPolicy) -> AbsencePredicate:
    """
    Absence test used while combining movements, before any speed model exists

    Endpoint speeds come from the last (first) record pair of each movement.
    """

    def is_absent(prev: Sequence[AisRecord], nxt: Sequence[AisRecord]) -> bool:
        v_exit = pair_speed_ms(prev[-2], prev[-1]) if len(prev) >= 2 else 0.0
        v_entry = pair_speed_ms(nxt[0], nxt[1]) if len(nxt) >= 2 else 0.0
        decision = decide_gap(
            prev[-1].pos,
            nxt[0].pos,
            nxt[0].time - prev[-1].time,
            _finite(v_exit) / KNOT_MS,
            _finite(v_entry) / KNOT_MS,
            0,
            policy,
        )
        return decision.absent

    return is_absent


def _finite(value: float) -> float:
    return value if math.isfinite(value) else 0.0


def build_journey(
    vessel: VesselCleanResult,
    trajectories: Sequence[Trajectory],
    policy: TransitPolicy,
    gross_tonnage: float | None = None,
) -> Journey:
    """
    Interleave a vessel's trajectories with the periods between them

    Raises:
        ConsistencyError: trajectories overlap in time
    """
    trajs = sorted(trajectories, key=lambda traj: traj.start_time)
    if not trajs:
        raise ConsistencyError(f"mmsi={vessel.mmsi}: no trajectories to assemble")
    stationary = vessel.stationary
    # Every received record counts inside a gap, cleansed away or not; repeats count once.
    times = sorted(t for t, _ in {(r.time, r.pos) for r in (*stationary, *vessel.rejected)})
    legs: list[Leg] = []

    leading = [r for r in stationary if r.time < trajs[0].start_time]
    if leading:
        legs.append(
            _stationary(
                vessel.mmsi,
                leading[0].time,
                trajs[0].start_time,
                leading[0].pos,
                trajs[0].route.start,
                policy,
            )
        )
    for prev, nxt in zip(trajs, trajs[1:]):
        if nxt.start_time < prev.end_time:
            raise ConsistencyError(
                f"mmsi={vessel.mmsi}: trajectories overlap at {nxt.start_time} < {prev.end_time}"
            )
        legs.append(prev)
        in_gap = bisect.bisect_left(times, nxt.start_time) - bisect.bisect_right(
            times, prev.end_time
        )
        legs.append(classify_gap(prev, nxt, max(in_gap, 0), policy))
    legs.append(trajs[-1])
    trailing = [r for r in stationary if r.time > trajs[-1].end_time]
    if trailing:
        legs.append(
            _stationary(
                vessel.mmsi,
                trajs[-1].end_time,
                trailing[-1].time,
                trajs[-1].route.end,
                trailing[-1].pos,
                policy,
            )
        )

    return Journey(
        mmsi=vessel.mmsi,
        category=categorize(dominant_vessel_type(vessel.type_codes)),
        legs=tuple(legs),
        gross_tonnage=gross_tonnage,
        destinations=vessel.destinations,
        utc_offset=_majority_offset(vessel),
    )


def _majority_offset(vessel: VesselCleanResult) -> int | None:
    offsets = Counter(
        r.utc_offset
        for records in (*(m.records for m in vessel.movements), vessel.stationary)
        for r in records
        if r.utc_offset is not None
    )
    return offsets.most_common(1)[0][0] if offsets else None


def apply_edge_rule(journey: Journey, start: int, end: int, policy: TransitPolicy) -> Journey | None:
    """
    Restrict a journey to the analysis window and mark the vessel absent
    before its first and after its last record

    Returns:
        The clipped journey, or None when no leg overlaps the window
    """
    kept: list[Leg] = []
    for leg in journey.legs:
        if leg.end_time < start or leg.start_time > end:
            continue
        if isinstance(leg, (StationaryPeriod, AbsentPeriod)):
            leg = dataclasses.replace(
                leg, start_time=max(leg.start_time, start), end_time=min(leg.end_time, end)
            )
        kept.append(leg)
    if not kept:
        return None

    first, last = kept[0], kept[-1]
    edge_entry = edge_exit = None
    if first.start_time > start:
        area = None
        if isinstance(first, Trajectory):
            area = in_transit_area(first.route.start, policy.areas)
        edge_entry = AbsentPeriod(journey.mmsi, start, first.start_time, entry_area=area)
    if last.end_time < end:
        area = None
        if isinstance(last, Trajectory):
            area = in_transit_area(last.route.end, policy.areas)
        edge_exit = AbsentPeriod(journey.mmsi, last.end_time, end, exit_area=area)
    return dataclasses.replace(
        journey, legs=tuple(kept), edge_entry=edge_entry, edge_exit=edge_exit
    )


@measure_latency("journey")
def build_journeys(
    vessels: Mapping[int, VesselCleanResult],
    trajectories: Mapping[int, Sequence[Trajectory]],
    policy: TransitPolicy,
    window: tuple[int, int],
    gross_tonnage: Mapping[int, float] | None = None,
    threads: int = 1,
) -> list[Journey]:
    """One journey per vessel, in ascending MMSI order, clipped to the window."""
    lookup = gross_tonnage or {}

    def assemble(mmsi: int) -> Journey | None:
        journey = build_journey(vessels[mmsi], trajectories[mmsi], policy, lookup.get(mmsi))
        return apply_edge_rule(journey, window[0], window[1], policy)

    journeys = [j for j in parallel_map(assemble, sorted(vessels), threads) if j is not None]
    absences = sum(len(j.absent_periods) for j in journeys)
    logger.info(
        "journeys_built",
        case=policy.case,
        journeys=len(journeys),
        absent_periods=absences,
        stationary_periods=sum(len(j.stationary_periods) for j in journeys),
    )
    return journeys
