"""
Activity pipeline: ingest, cleanse, trajectories, per-case journeys and
counts, activity maps, ports, uncertainty

Every stage writes its outputs as soon as it finishes, so a failing stage
leaves earlier outputs in place. The manifest is written in all cases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import numpy.typing as npt

from app.core.config import CaseName, Settings
from app.core.exceptions import ConfigError
from app.geo.grid import GridSpec
from app.ingest.reader import group_by_vessel, read_gross_tonnage, read_records
from app.ingest.roi import RoiSpec, filter_roi
from app.landmask.factory import get_land_mask
from app.landmask.protocol import LandMaskProtocol
from app.models.port import PortArea
from app.models.record import AisRecord
from app.models.trajectory import Trajectory
from app.output import writers
from app.schemas.metrics import UncertaintyRow
from app.schemas.report import (
    ModelAccuracyReport,
    RunManifest,
    StageStatus,
    TravelTimeSummary,
)
from app.services.base import BaseService
from app.services.cleanse import CleanseResult, run_cleanse
from app.services.journey import absence_predicate
from app.services.metrics import (
    DAY_S,
    ActivityGrid,
    activity_layers,
    build_activity_grid,
    daily_cycle,
    density_map,
)
from app.services.ports import find_ports, port_arrivals, port_occupancy
from app.services.trajectory import SpeedComparisonRow, build_trajectories, validate_model
from app.services.uncertainty import (
    CaseResult,
    policy_for,
    run_cases,
    travel_days,
    uncertainty_rows,
)

RUN_STAGES = ("ingest", "cleanse", "trajectory", "cases", "maps", "ports", "uncertainty")
VALIDATE_STAGES = ("ingest", "cleanse", "trajectory", "validate")


@dataclass
class IngestResult:
    per_vessel: dict[int, list[AisRecord]]
    window: tuple[int, int] | None
    gross_tonnage: dict[int, float] = field(default_factory=dict)

    @property
    def n_records(self) -> int:
        return sum(len(records) for records in self.per_vessel.values())


@dataclass
class RunResult:
    """In-memory results of a run, next to the files written to `out_dir`."""

    out_dir: Path
    window: tuple[int, int] | None = None
    cleansed: CleanseResult | None = None
    trajectories: dict[int, list[Trajectory]] = field(default_factory=dict)
    cases: dict[CaseName, CaseResult] = field(default_factory=dict)
    activity: ActivityGrid | None = None
    layers: dict[str, npt.NDArray[np.float64]] = field(default_factory=dict)
    ports: list[PortArea] = field(default_factory=list)
    uncertainty: list[UncertaintyRow] = field(default_factory=list)
    accuracy: ModelAccuracyReport | None = None
    speed_comparison: list[SpeedComparisonRow] = field(default_factory=list)
    outputs: list[Path] = field(default_factory=list)

    @property
    def reference(self) -> CaseResult | None:
        """The df case, or the first case run when df was not selected."""
        if "df" in self.cases:
            return self.cases["df"]
        return next(iter(self.cases.values()), None)


def derive_window(per_vessel: dict[int, list[AisRecord]], bin_s: int) -> tuple[int, int] | None:
    """First record floored and last record rounded up to the bin width; None without records."""
    times = [r.time for records in per_vessel.values() for r in records]
    if not times:
        return None
    start = (min(times) // bin_s) * bin_s
    end = math.ceil(max(times) / bin_s) * bin_s
    return start, max(end, start + bin_s)


class ActivityPipeline(BaseService):
    """
    Batch pipeline over one record source

    Args:
        config: effective settings (paths, ROI, thresholds, cases)
        land_mask: elevation source; built from `config` when omitted
    """

    def __init__(self, config: Settings, *, land_mask: LandMaskProtocol | None = None) -> None:
        super().__init__(threads=config.threads)
        self.config = config
        self.land_mask = land_mask
        self.roi: RoiSpec | None = None

    @property
    def grid(self) -> GridSpec:
        roi = self.roi or RoiSpec.from_settings(self.config)
        return roi.grid(self.config.metrics.grid_dphi_arcsec, self.config.metrics.grid_dlon_arcsec)

    # Stages

    def ingest(self) -> IngestResult:
        def action() -> IngestResult:
            if self.config.input_path is None:
                raise ConfigError("no input path configured")
            if self.land_mask is None:
                self.land_mask = get_land_mask(self.config)
            self.roi = RoiSpec.from_settings(self.config, self.land_mask)
            window = self.config.analysis_window
            records = filter_roi(read_records(self.config.input_path), self.roi, window)
            per_vessel, _ = group_by_vessel(records)
            lookup = (
                read_gross_tonnage(self.config.gross_tonnage_path)
                if self.config.gross_tonnage_path is not None
                else {}
            )
            return IngestResult(
                per_vessel, window or derive_window(per_vessel, self.config.metrics.bin_s), lookup
            )

        return self._execute_with_handling(
            "ingest",
            action,
            metadata=lambda r: {"vessels": len(r.per_vessel), "records": r.n_records, "window": r.window},
        )

    def cleanse(self, ingested: IngestResult) -> CleanseResult:
        roi = self.roi or RoiSpec.from_settings(self.config)
        return self._execute_with_handling(
            "cleanse",
            lambda: run_cleanse(
                ingested.per_vessel,
                roi.areas,
                self.config.cleanse,
                is_absent=absence_predicate(policy_for("df", self.config)),
                threads=self.threads,
            ),
            metadata=lambda r: {"vessels": len(r.vessels), "rejected": len(r.rejected)},
        )

    def trajectory(self, cleansed: CleanseResult) -> dict[int, list[Trajectory]]:
        def action() -> dict[int, list[Trajectory]]:
            mmsis = sorted(cleansed.vessels)
            built = self._map_parallel(
                lambda mmsi: build_trajectories(cleansed.vessels[mmsi].movements, self.config.model),
                mmsis,
            )
            return dict(zip(mmsis, built))

        return self._execute_with_handling(
            "trajectory",
            action,
            metadata=lambda r: {"trajectories": sum(len(t) for t in r.values())},
        )

    # Commands

    def run(self, out_dir: Path | str) -> RunResult:
        """
        Full analysis; outputs land in `out_dir`

        Raises:
            StageError: tagged with the failing stage; the manifest is still written
        """
        result = RunResult(Path(out_dir))
        result.out_dir.mkdir(parents=True, exist_ok=True)
        try:
            self._run_stages(result)
        finally:
            self._write_manifest(result, "run", RUN_STAGES)
        return result

    def _run_stages(self, result: RunResult) -> None:
        out = result.out_dir
        ingested = self.ingest()
        result.window = ingested.window

        cleansed = self.cleanse(ingested)
        result.cleansed = cleansed
        result.outputs += [
            writers.write_json(out / writers.CLEANSE_REPORT_FILE, cleansed.report),
            writers.write_records(out / writers.REJECTED_FILE, cleansed.rejected),
        ]

        result.trajectories = self.trajectory(cleansed)
        all_trajectories = [t for mmsi in sorted(result.trajectories) for t in result.trajectories[mmsi]]
        summary = TravelTimeSummary(
            trajectories=len(all_trajectories), travel_days=travel_days(all_trajectories)
        )
        result.outputs.append(writers.write_json(out / writers.TRAVEL_TIME_FILE, summary))

        result.cases = self._execute_with_handling(
            "cases", lambda: self._cases(result, ingested)
        )
        self._execute_with_handling("maps", lambda: self._maps(result))
        self._execute_with_handling(
            "ports", lambda: self._ports(result), metadata=lambda r: {"ports": len(r)}
        )
        if "df" in result.cases or result.window is None:
            self._execute_with_handling("uncertainty", lambda: self._uncertainty(result))
        else:
            self.stage_status["uncertainty"] = ("skipped", "df case not selected")
            result.outputs.append(writers.write_uncertainty(out / writers.UNCERTAINTY_FILE, []))

    def _cases(self, result: RunResult, ingested: IngestResult) -> dict[CaseName, CaseResult]:
        out = result.out_dir
        cases: dict[CaseName, CaseResult] = {}
        if result.window is not None and result.cleansed is not None:
            cases = run_cases(
                result.cleansed,
                result.trajectories,
                self.config.cases,
                result.window,
                self.config,
                ingested.gross_tonnage,
            )
        result.cases = cases
        reference = result.reference
        rows, summaries = daily_cycle(reference.timeline) if reference else ([], [])
        result.outputs += [
            writers.write_counts(out / writers.COUNTS_FILE, {c: r.timeline for c, r in cases.items()}),
            writers.write_averages(out / writers.AVERAGES_FILE, {c: r.averages for c, r in cases.items()}),
            *writers.write_daily_cycle(out, rows, summaries),
            writers.write_journeys(out / writers.TRAJECTORIES_FILE, reference.journeys if reference else []),
        ]
        return cases

    def _period_s(self, result: RunResult) -> float:
        if result.window is None:
            return float(DAY_S)
        return float(result.window[1] - result.window[0])

    def _maps(self, result: RunResult) -> ActivityGrid:
        reference = result.reference
        grid = self.grid
        if reference is None:
            activity = ActivityGrid.empty(grid)
        else:
            activity = build_activity_grid(
                reference.journeys,
                grid,
                self.land_mask,
                self.config.metrics.sample_step_m,
                self.threads,
            )
        result.activity = activity
        result.layers = activity_layers(activity, self._period_s(result))
        result.outputs += writers.write_rasters(result.out_dir, result.layers, grid)
        return activity

    def _ports(self, result: RunResult) -> list[PortArea]:
        grid = self.grid
        period_s = self._period_s(result)
        ports: list[PortArea] = []
        reference = result.reference
        if result.activity is not None:
            density = density_map(result.activity, period_s)
            ports = find_ports(density, grid, self.config.ports, self.land_mask)
            ports = port_occupancy(density, ports, grid)
            if reference is not None:
                ports = port_arrivals(
                    reference.journeys, ports, grid, period_s / DAY_S, reference.policy.kiel_box
                )
        result.ports = ports
        result.outputs += [
            writers.write_ports_csv(result.out_dir / writers.PORTS_CSV_FILE, ports),
            writers.write_ports_geojson(result.out_dir / writers.PORTS_GEOJSON_FILE, ports, grid),
        ]
        return ports

    def _uncertainty(self, result: RunResult) -> list[UncertaintyRow]:
        rows: list[UncertaintyRow] = []
        if result.cases:
            rows = uncertainty_rows(
                {case: r.averages for case, r in result.cases.items()}, self.config.uncertainty
            )
        result.uncertainty = rows
        result.outputs.append(writers.write_uncertainty(result.out_dir / writers.UNCERTAINTY_FILE, rows))
        return rows

    def validate(self, out_dir: Path | str) -> RunResult:
        """
        Compare message positions with the trajectory model

        Raises:
            StageError: tagged with the failing stage; the manifest is still written
        """
        result = RunResult(Path(out_dir))
        result.out_dir.mkdir(parents=True, exist_ok=True)
        try:
            ingested = self.ingest()
            result.window = ingested.window
            cleansed = self.cleanse(ingested)
            result.cleansed = cleansed
            result.trajectories = self.trajectory(cleansed)

            def action() -> tuple[ModelAccuracyReport, list[SpeedComparisonRow]]:
                mmsis = sorted(cleansed.vessels)
                movements = [m for mmsi in mmsis for m in cleansed.vessels[mmsi].movements]
                trajectories = [t for mmsi in mmsis for t in result.trajectories[mmsi]]
                return validate_model(movements, trajectories, self.config.model.d_tol_m)

            report, comparison = self._execute_with_handling("validate", action)
            result.accuracy, result.speed_comparison = report, comparison
            result.outputs += [
                writers.write_model_accuracy(result.out_dir / writers.MODEL_ACCURACY_FILE, report),
                writers.write_speed_comparison(
                    result.out_dir / writers.SPEED_COMPARISON_FILE, comparison
                ),
            ]
        finally:
            self._write_manifest(result, "validate", VALIDATE_STAGES)
        return result

    # Manifest

    def _input_checksums(self) -> dict[str, str]:
        sources: dict[str, Any] = {
            "input": self.config.input_path,
            "land_mask": self.config.land_mask_path,
            "gross_tonnage": self.config.gross_tonnage_path,
        }
        return {
            name: writers.sha256_file(path)
            for name, path in sources.items()
            if path is not None and Path(path).is_file()
        }

    def _write_manifest(self, result: RunResult, command: str, stages: tuple[str, ...]) -> None:
        statuses = {
            stage: StageStatus(
                state=self.stage_status.get(stage, ("skipped", None))[0],
                error=self.stage_status.get(stage, ("skipped", None))[1],
            )
            for stage in stages
        }
        manifest = RunManifest(
            app=self.config.app_name,
            version=self.config.app_version,
            command=command,
            config_hash=self.config.config_hash,
            inputs=self._input_checksums(),
            packages=writers.package_versions(),
            stages=statuses,
            outputs=sorted(path.name for path in result.outputs),
            effective_config=self.config.effective_values(),
        )
        writers.write_json(result.out_dir / writers.MANIFEST_FILE, manifest)
        self.logger.info(
            "manifest_written",
            command=command,
            failed=[name for name, status in statuses.items() if status.state == "failed"],
        )

