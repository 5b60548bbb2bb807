from pydantic import BaseModel, Field, field_validator, model_validator
from typing import Any, Dict, List, Optional, Tuple
from datetime import datetime
import math

import numpy as np

from climtrend.config import settings
from climtrend.models import DatasetKind, DefectKind, Season, Trend


# Sample schemas
class Sample(BaseModel):
    """
    Ordered observations fed to the statistics, with optional time coordinates.

    When times are absent the 1-based observation index is used.
    """
    values: List[float]
    times: Optional[List[float]] = None

    class Config:
        frozen = True

    @field_validator("values")
    @classmethod
    def _finite_values(cls, values: List[float]) -> List[float]:
        for i, value in enumerate(values):
            if not math.isfinite(value):
                raise ValueError(f"value at position {i} is not finite: {value}")
        return values

    @field_validator("times")
    @classmethod
    def _increasing_times(cls, times: Optional[List[float]]) -> Optional[List[float]]:
        if times is None:
            return times
        for i, value in enumerate(times):
            if not math.isfinite(value):
                raise ValueError(f"time at position {i} is not finite: {value}")
            if i and value <= times[i - 1]:
                raise ValueError(f"times must be strictly increasing (position {i})")
        return times

    @model_validator(mode="after")
    def _matching_lengths(self) -> "Sample":
        if self.times is not None and len(self.times) != len(self.values):
            raise ValueError(f"values ({len(self.values)}) and times ({len(self.times)}) differ in length")
        return self

    @property
    def n(self) -> int:
        return len(self.values)

    def x(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)

    def t(self) -> np.ndarray:
        if self.times is None:
            return np.arange(1, self.n + 1, dtype=np.float64)
        return np.asarray(self.times, dtype=np.float64)


class TieSummary(BaseModel):
    groups: List[Tuple[float, int]] = []
    m: int = 0

    class Config:
        frozen = True

    @model_validator(mode="after")
    def _consistent(self) -> "TieSummary":
        if self.m != len(self.groups):
            raise ValueError("m must equal the number of tied groups")
        if any(multiplicity < 2 for _, multiplicity in self.groups):
            raise ValueError("every tied group has multiplicity >= 2")
        if len({value for value, _ in self.groups}) != len(self.groups):
            raise ValueError("tied groups must be disjoint by value")
        return self

    @property
    def tied_count(self) -> int:
        return sum(multiplicity for _, multiplicity in self.groups)


# Result schemas
class TrendTestResult(BaseModel):
    n: int
    s: int
    var_s: float = Field(ge=0.0)
    z: float
    p_two_sided: float = Field(ge=0.0, le=1.0)
    tau_a: float = Field(ge=-1.0, le=1.0)
    tau_b: float = Field(ge=-1.0, le=1.0)
    h: bool
    alpha: float = Field(gt=0.0, lt=1.0)
    trend: Trend

    class Config:
        frozen = True


class SenEstimate(BaseModel):
    slope: float
    intercept: float
    ci_lower: float
    ci_upper: float
    confidence: float = Field(gt=0.0, lt=1.0)
    n_pairs: int

    class Config:
        frozen = True


class AnomalySeries(BaseModel):
    anomalies: List[float]
    source_mean: float
    source_sd: float = Field(gt=0.0)

    class Config:
        frozen = True


class NormalityResult(BaseModel):
    n: int
    w: float = Field(gt=0.0, le=1.0)
    p_value: float = Field(ge=0.0, le=1.0)

    class Config:
        frozen = True

    def is_normal_at(self, alpha: float) -> bool:
        """Normality is not rejected at level alpha."""
        return self.p_value >= alpha


class QQData(BaseModel):
    points: List[Tuple[float, float]] = []
    correlation: Optional[float] = None

    class Config:
        frozen = True

    @property
    def theoretical(self) -> List[float]:
        return [q for q, _ in self.points]

    @property
    def sample(self) -> List[float]:
        return [v for _, v in self.points]


# Climate schemas
class Observation(BaseModel):
    timestamp: datetime
    value: float

    class Config:
        frozen = True

    @field_validator("value")
    @classmethod
    def _plausible_temperature(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("temperature must be finite")
        if not settings.TEMPERATURE_MIN_C <= value <= settings.TEMPERATURE_MAX_C:
            raise ValueError(
                f"temperature {value} outside [{settings.TEMPERATURE_MIN_C}, {settings.TEMPERATURE_MAX_C}] C"
            )
        return value


class SeasonLabel(BaseModel):
    season: Season
    season_year: int

    class Config:
        frozen = True

    def sort_key(self) -> Tuple[int, int]:
        return (self.season_year, self.season.order)


class AnnualSummary(BaseModel):
    year: int
    t_max: float
    t_min: float
    std_dev: float = Field(ge=0.0)
    count: int = Field(ge=1)

    class Config:
        frozen = True

    @model_validator(mode="after")
    def _ordered_extremes(self) -> "AnnualSummary":
        if self.t_min > self.t_max:
            raise ValueError("t_min exceeds t_max")
        return self


class RegionChange(BaseModel):
    region: str
    change: float

    class Config:
        frozen = True

    @field_validator("change")
    @classmethod
    def _finite_change(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("change must be finite")
        return value


# Ingestion schemas
class Defect(BaseModel):
    kind: DefectKind
    line: int
    source: Optional[str] = None
    column: Optional[str] = None
    detail: str = ""

    class Config:
        frozen = True


class RegionWideTable(BaseModel):
    regions: List[str]
    years: List[int]
    cells: List[List[Optional[float]]]
    rows_read: int = 0
    defects: List[Defect] = []

    @model_validator(mode="after")
    def _shape(self) -> "RegionWideTable":
        if any(b <= a for a, b in zip(self.years, self.years[1:])):
            raise ValueError("years must be strictly increasing")
        if len(self.cells) != len(self.regions) or any(len(row) != len(self.years) for row in self.cells):
            raise ValueError("cell matrix does not match regions x years")
        return self

    def series(self, region: str) -> List[Tuple[int, float]]:
        """(year, value) pairs of one region, missing cells skipped."""
        row = self.cells[self.regions.index(region)]
        return [(year, value) for year, value in zip(self.years, row) if value is not None]


class StationRecordSet(BaseModel):
    station_id: str
    timezone: str = "local"
    records: List[Observation] = []
    rows_read: int = 0
    defects: List[Defect] = []

    @model_validator(mode="after")
    def _sorted(self) -> "StationRecordSet":
        stamps = [record.timestamp for record in self.records]
        if any(b < a for a, b in zip(stamps, stamps[1:])):
            raise ValueError("records must be sorted by timestamp")
        return self


class CleaningReport(BaseModel):
    rows_read: int
    records_out: int
    duplicates_removed: int = 0
    nulls_encountered: int = 0
    rows_rejected: int = 0
    cells_rejected: int = 0
    conflicts_flagged: int = 0
    duplicate_lines: List[int] = []
    null_lines: List[int] = []
    rejected_lines: List[int] = []
    conflict_lines: List[int] = []


# Report schemas
class DatasetDescriptor(BaseModel):
    name: str
    kind: DatasetKind
    n: int
    station_id: Optional[str] = None
    start: Optional[str] = None
    end: Optional[str] = None
    units: str = "degC"


class ReportMetadata(BaseModel):
    tool: str
    version: str
    input_sha256: str
    parameters: Dict[str, Any] = {}


class TrendReport(BaseModel):
    dataset: DatasetDescriptor
    trend: TrendTestResult
    sen: SenEstimate
    normality: Optional[NormalityResult] = None
    metadata: ReportMetadata
