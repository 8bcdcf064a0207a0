"""
Tabular metric outputs: averages, daily cycle, uncertainty brackets
"""

from typing import Literal

from pydantic import Field

from app.schemas.base import BaseSchema

Quantity = Literal["moving", "stationary", "total", "transits_per_day"]
AveragingWindow = Literal["full", "central"]


class AverageRow(BaseSchema):
    """
    Mean of one count series over its averaging window

    Moving counts average over the full period; stationary and total counts
    over the central window. `stat` is the spread of the per-day values.
    """

    quantity: Quantity
    scope: str
    window: AveragingWindow
    window_days: float = Field(ge=0)
    mean: float
    stat: float = Field(ge=0)


class DailyCycleRow(BaseSchema):
    tod_bin: int = Field(ge=0)
    tod_start_h: float = Field(ge=0, lt=24)
    moving: int = Field(ge=0)
    stationary: int = Field(ge=0)
    entries: int = Field(ge=0)
    exits: int = Field(ge=0)


class CycleSummary(BaseSchema):
    """Mode, circular mean and circular standard deviation of one daily series, in hours."""

    series: str
    total: int = Field(ge=0)
    mode_h: float | None = None
    circular_mean_h: float | None = None
    circular_std_h: float | None = None


class UncertaintyRow(BaseSchema):
    """One bracketed value; `case_low` and `case_hi` are the same quantity under the varied transit rules."""

    quantity: Quantity
    category: str
    value: float
    stat: float = Field(ge=0)
    syst_plus: float = Field(ge=0)
    syst_minus: float = Field(ge=0)
    case_low: float
    case_hi: float
