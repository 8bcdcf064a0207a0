"""
Systematic uncertainty: case variations, untracked and AIS-B fractions,
and the rerun over rejected records
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from pydantic import ValidationError as PydanticValidationError

from app.core.config import CaseName, Settings, UncertaintyConfig
from app.core.exceptions import ConfigError, InputFormatError, SourceReadError
from app.core.logging import get_logger, measure_latency
from app.geo.grid import ARCSEC_DEG
from app.ingest.areas import AreaVariant, transit_areas
from app.ingest.reader import group_by_vessel, read_records
from app.models.journey import Journey
from app.models.trajectory import Trajectory
from app.schemas.metrics import AverageRow, UncertaintyRow
from app.schemas.report import RejectedRerunReport, TravelTimeSummary
from app.services.cleanse import CleanseResult, run_cleanse
from app.services.journey import TransitPolicy, absence_predicate, build_journeys
from app.services.metrics import (
    ALL_SCOPE,
    CountTimeline,
    average_counts,
    count_timeline,
    split_rate_scope,
)
from app.services.trajectory import build_trajectories

logger = get_logger(__name__)

COUNT_QUANTITIES = ("moving", "stationary", "total")


@dataclass(frozen=True)
class BracketedValue:
    value: float
    stat_err: float = 0.0
    syst_plus: float = 0.0
    syst_minus: float = 0.0

    def __post_init__(self) -> None:
        if self.stat_err < 0 or self.syst_plus < 0 or self.syst_minus < 0:
            raise ValueError("uncertainties must be non-negative")


def _tilde(delta: float) -> float:
    if not 0.0 <= delta < 1.0:
        raise ConfigError(f"fraction must lie in [0, 1), got {delta}")
    return delta / (1.0 - delta)


def _missing_share(value: float, delta_dark: float, delta_aisb: float) -> float:
    return (_tilde(delta_dark) ** 2 + _tilde(delta_aisb) ** 2) * value**2


def combine_counts(
    n_df: float,
    n_hi: float,
    n_low: float,
    delta_dark: float,
    delta_aisb: float,
    stat_err: float = 0.0,
) -> BracketedValue:
    """
    Bracket a vessel count

    The upper bound adds the hi-case shift and the untracked/AIS-B shares in
    quadrature; the lower bound is the shift to case low, floored at zero.

    Raises:
        ConfigError: a fraction outside [0, 1)
    """
    plus = math.sqrt((n_df - n_hi) ** 2 + _missing_share(n_df, delta_dark, delta_aisb))
    return BracketedValue(n_df, stat_err, plus, max(0.0, n_df - n_low))


def combine_rates(
    r_df: float,
    r_hi: float,
    r_low: float,
    delta_dark: float,
    delta_aisb: float,
    stat_err: float = 0.0,
) -> BracketedValue:
    """
    Bracket a transit rate; the cases swap roles compared with counts

    Raises:
        ConfigError: a fraction outside [0, 1)
    """
    plus = math.sqrt((r_df - r_low) ** 2 + _missing_share(r_df, delta_dark, delta_aisb))
    return BracketedValue(r_df, stat_err, plus, max(0.0, r_df - r_hi))


def uncertainty_rows(
    averages: Mapping[CaseName, Sequence[AverageRow]],
    config: UncertaintyConfig | None = None,
) -> list[UncertaintyRow]:
    """
    Brackets for every count and transit rate of the df case

    Counts use the scope's AIS-B fraction with the global untracked fraction;
    transit rates use the area's untracked fraction with the AIS-B fraction of
    their category or size class (the global one when not narrowed).
    A case missing from `averages` contributes the df value.
    """
    c = config or UncertaintyConfig()
    if "df" not in averages:
        raise ConfigError("uncertainty brackets need the df case")
    by_case = {
        case: {(row.quantity, row.scope): row.mean for row in rows}
        for case, rows in averages.items()
    }

    rows: list[UncertaintyRow] = []
    for row in averages["df"]:
        key = (row.quantity, row.scope)
        low = by_case.get("low", {}).get(key, row.mean)
        hi = by_case.get("hi", {}).get(key, row.mean)
        if row.quantity in COUNT_QUANTITIES:
            bracket = combine_counts(
                row.mean,
                hi,
                low,
                c.dark_fraction(ALL_SCOPE),
                c.aisb_fraction(row.scope),
                row.stat,
            )
        else:
            area, group = split_rate_scope(row.scope)
            bracket = combine_rates(
                row.mean, hi, low, c.dark_fraction(area), c.aisb_fraction(group), row.stat
            )
        rows.append(
            UncertaintyRow(
                quantity=row.quantity,
                category=row.scope,
                value=bracket.value,
                stat=bracket.stat_err,
                syst_plus=bracket.syst_plus,
                syst_minus=bracket.syst_minus,
                case_low=low,
                case_hi=hi,
            )
        )
    return rows


@dataclass(frozen=True)
class CaseResult:
    case: CaseName
    policy: TransitPolicy
    journeys: list[Journey]
    timeline: CountTimeline
    averages: list[AverageRow]

    def mean(self, quantity: str, scope: str = ALL_SCOPE) -> float:
        for row in self.averages:
            if row.quantity == quantity and row.scope == scope:
                return row.mean
        return 0.0


def policy_for(case: CaseName, config: Settings) -> TransitPolicy:
    return TransitPolicy.for_case(
        case,
        config.journey,
        config.metrics.grid_dphi_arcsec * ARCSEC_DEG,
        config.metrics.grid_dlon_arcsec * ARCSEC_DEG,
    )


@measure_latency("run_cases")
def run_cases(
    cleansed: CleanseResult,
    trajectories: Mapping[int, Sequence[Trajectory]],
    cases: Sequence[CaseName],
    window: tuple[int, int],
    config: Settings,
    gross_tonnage: Mapping[int, float] | None = None,
) -> dict[CaseName, CaseResult]:
    """Journeys, count timeline and averages once per case; the cases differ only in transit policy."""
    results: dict[CaseName, CaseResult] = {}
    for case in cases:
        policy = policy_for(case, config)
        journeys = build_journeys(
            cleansed.vessels, trajectories, policy, window, gross_tonnage, config.threads
        )
        timeline = count_timeline(
            journeys, window[0], window[1], config.metrics.bin_s, config.metrics.size_class_gt
        )
        averages = average_counts(timeline, config.metrics.stationary_window_days)
        result = CaseResult(case, policy, journeys, timeline, averages)
        results[case] = result
        logger.info(
            "case_completed",
            case=case,
            journeys=len(journeys),
            vessels=round(result.mean("total"), 3),
            transits_per_day=round(result.mean("transits_per_day"), 3),
        )
    return results


def travel_days(trajectories: Sequence[Trajectory]) -> float:
    return sum(traj.duration for traj in trajectories) / 86_400


def read_travel_time(path: Path | str) -> TravelTimeSummary:
    """
    Raises:
        SourceReadError: the summary of the main run is missing
        InputFormatError: the summary cannot be parsed
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SourceReadError(f"cannot read travel-time summary {path}: {exc}") from exc
    try:
        return TravelTimeSummary.model_validate_json(text)
    except PydanticValidationError as exc:
        raise InputFormatError(f"malformed travel-time summary {path}") from exc


@measure_latency("rerun_rejected")
def rerun_rejected(sink: Path | str, travel_time: Path | str, config: Settings) -> RejectedRerunReport:
    """
    Repeat cleansing and trajectory modelling on the rejected records alone

    The travel time recovered from them bounds how much activity cleansing
    may have discarded.

    Raises:
        SourceReadError: the rejected-record sink or the main-run summary is missing
    """
    if not Path(sink).is_file():
        raise SourceReadError(f"rejected-record sink not found: {sink}")
    main = read_travel_time(travel_time)
    per_vessel, _ = group_by_vessel(read_records(sink))
    n_records = sum(len(records) for records in per_vessel.values())
    if not per_vessel:
        return RejectedRerunReport(main_travel_days=main.travel_days)

    areas = transit_areas(AreaVariant(config.transit_area_variant))
    cleansed = run_cleanse(
        per_vessel,
        areas,
        config.cleanse,
        is_absent=absence_predicate(policy_for("df", config)),
        threads=config.threads,
    )
    movements = [m for vessel in cleansed.vessels.values() for m in vessel.movements]
    recovered = travel_days(build_trajectories(movements, config.model))
    report = RejectedRerunReport(
        rejected_records=n_records,
        rejected_travel_days=recovered,
        main_travel_days=main.travel_days,
        ratio=recovered / main.travel_days if main.travel_days > 0 else 0.0,
    )
    logger.info(
        "rejected_rerun_completed",
        rejected_records=n_records,
        rejected_travel_days=round(recovered, 6),
        main_travel_days=round(main.travel_days, 6),
    )
    return report
