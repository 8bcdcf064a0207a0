"""
Application Configuration
Pydantic Settings for environment- and file-based configuration
"""

import hashlib
import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from app.core.exceptions import ConfigError

CaseName = Literal["low", "df", "hi"]


class CleanseThresholds(BaseModel):
    """Message cleansing and movement segmentation constants."""

    static_square_m: float = Field(default=400.0, gt=0)
    duplicate_max_dt_s: float = Field(default=5.0, gt=0)
    duplicate_max_speed_kmh: float = Field(default=1.0, gt=0)
    duplicate_max_distance_m: float = Field(default=1.0, gt=0)
    stationary_speed_kn: float = Field(default=0.5, gt=0)
    max_gap_h: float = Field(default=48.0, gt=0)
    max_jump_km: float = Field(default=750.0, gt=0)
    max_speed_kn: float = Field(default=50.0, gt=0)
    max_accel_ms2: float = Field(default=1.0, gt=0)
    combine_gap_s: float = Field(default=120.0, gt=0)


class ModelThresholds(BaseModel):
    """Route simplification and speed model constants."""

    d_tol_m: float = Field(default=100.0, gt=0)
    speed_change_fraction: float = Field(default=0.05, gt=0)
    min_speed_ms: float = Field(default=0.01, gt=0)


class JourneyThresholds(BaseModel):
    """Stationary/absent gap classification constants."""

    t0_h: float = Field(default=6.0, gt=0)
    t0_low_h: float = Field(default=1.0, gt=0)
    kiel_idle_h: float = Field(default=24.0, gt=0)
    kiel_buffer_cells: int = Field(default=1, gt=0)
    resolved_idle_distance_m: float = Field(default=1000.0, gt=0)


class MetricsThresholds(BaseModel):
    """Count timeline and activity grid constants."""

    bin_s: int = Field(default=240, gt=0)
    stationary_window_days: float = Field(default=21.0, gt=0)
    sample_step_m: float = Field(default=100.0, gt=0)
    land_elevation_m: float = Field(default=2.0, gt=0)
    grid_dphi_arcsec: float = Field(default=15.0, gt=0)
    grid_dlon_arcsec: float = Field(default=30.0, gt=0)
    size_class_gt: float = Field(default=10_000.0, gt=0)


class PortThresholds(BaseModel):
    """Port segmentation constants."""

    threshold: float = Field(default=0.5, gt=0, description="vessels per km2")
    sigma_cells: float = Field(default=1.5, gt=0)
    min_cells: int = Field(default=3, gt=0)
    coast_distance_km: float = Field(default=2.7, gt=0)


class UncertaintyConfig(BaseModel):
    """Untracked-vessel and AIS-B fractions used for the systematic brackets."""

    delta_dark: dict[str, float] = Field(
        default_factory=lambda: {"ALL": 0.21, "Skagerrak": 0.13, "Kiel Canal": 0.00}
    )
    delta_aisb: dict[str, float] = Field(
        default_factory=lambda: {
            "ALL": 0.30,
            "PassengerHighSpeed": 0.11,
            "LawEnforcementMilitary": 0.20,
            "Cargo": 0.13,
            "PilotTugRescueDiving": 0.18,
            "Tanker": 0.005,  # "<1%"
            "OthersIncludingFishing": 0.55,
            "LT10k": 0.37,
            "GE10k": 0.00,
        }
    )

    @field_validator("delta_dark", "delta_aisb")
    @classmethod
    def _fractions_in_range(cls, value: dict[str, float]) -> dict[str, float]:
        for scope, fraction in value.items():
            if not 0.0 <= fraction < 1.0:
                raise ValueError(f"fraction for {scope!r} must lie in [0, 1), got {fraction}")
        return value

    def dark_fraction(self, scope: str = "ALL") -> float:
        return self.delta_dark.get(scope, self.delta_dark["ALL"])

    def aisb_fraction(self, scope: str = "ALL") -> float:
        return self.delta_aisb.get(scope, self.delta_aisb["ALL"])


class Settings(BaseSettings):
    """
    Application settings from environment variables or a key=value config file
    """

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_nested_delimiter="__",
        case_sensitive=False,
        extra="ignore",
    )

    # Application
    app_name: str = "ais-activity"
    app_version: str = "0.1.0"

    # Paths
    input_path: Path | None = None
    land_mask_path: Path | None = None
    gross_tonnage_path: Path | None = None
    output_dir: Path = Path("out")

    # Region of interest (Baltic Sea run)
    roi_lat_min: float = Field(default=53.0, ge=-90, le=90)
    roi_lat_max: float = Field(default=66.0, ge=-90, le=90)
    roi_lon_min: float = Field(default=9.0, ge=-180, le=180)
    roi_lon_max: float = Field(default=32.0, ge=-180, le=180)
    timezone_split_lon: float = 19.5
    transit_area_variant: Literal["small", "default", "large"] = "default"

    # Analysis window; derived from the data when unset
    analysis_start: datetime | None = None
    analysis_end: datetime | None = None

    # Execution
    case: Literal["low", "df", "hi", "all"] = "all"
    threads: int = Field(default=1, ge=1)

    # Thresholds
    cleanse: CleanseThresholds = Field(default_factory=CleanseThresholds)
    model: ModelThresholds = Field(default_factory=ModelThresholds)
    journey: JourneyThresholds = Field(default_factory=JourneyThresholds)
    metrics: MetricsThresholds = Field(default_factory=MetricsThresholds)
    ports: PortThresholds = Field(default_factory=PortThresholds)
    uncertainty: UncertaintyConfig = Field(default_factory=UncertaintyConfig)

    # Logging
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"
    log_json: bool = False

    @model_validator(mode="after")
    def _check_ranges(self) -> "Settings":
        if self.roi_lat_min >= self.roi_lat_max or self.roi_lon_min >= self.roi_lon_max:
            raise ValueError("ROI bounds must satisfy min < max")
        if (
            self.analysis_start is not None
            and self.analysis_end is not None
            and self.analysis_start >= self.analysis_end
        ):
            raise ValueError("analysis_start must precede analysis_end")
        return self

    @property
    def analysis_window(self) -> tuple[int, int] | None:
        """Analysis window as UNIX seconds, or None when it is derived from the data"""
        if self.analysis_start is None or self.analysis_end is None:
            return None
        return _unix(self.analysis_start), _unix(self.analysis_end)

    @property
    def cases(self) -> list[CaseName]:
        if self.case == "all":
            return ["df", "low", "hi"]
        return [self.case]

    def effective_values(self) -> dict[str, Any]:
        """Effective configuration, JSON-serializable, for the run manifest"""
        return self.model_dump(mode="json")

    @property
    def config_hash(self) -> str:
        canonical = json.dumps(self.effective_values(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _unix(value: datetime) -> int:
    if value.tzinfo is None:
        value = value.replace(tzinfo=timezone.utc)
    return int(value.timestamp())


def load_settings(config_path: Path | str | None = None, **overrides: Any) -> Settings:
    """
    Build settings from the environment, an optional config file and overrides

    Args:
        config_path: key=value file read like a dotenv file
        overrides: explicit values (e.g. from CLI flags), applied last

    Raises:
        ConfigError: if the file is missing or any value is invalid
    """
    if config_path is not None and not Path(config_path).is_file():
        raise ConfigError(f"config file not found: {config_path}")
    clean = {key: value for key, value in overrides.items() if value is not None}
    try:
        if config_path is not None:
            return Settings(_env_file=str(config_path), **clean)
        return Settings(**clean)
    except ValidationError as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc


# Global settings instance
settings = Settings()
