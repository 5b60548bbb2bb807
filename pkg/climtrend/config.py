from pydantic import BaseModel, Field, field_validator, model_validator
from pydantic_settings import BaseSettings
from typing import Any, Dict, List, Mapping, Optional
from pathlib import Path
from dotenv import load_dotenv, dotenv_values

from climtrend.exceptions import ConfigurationError
from climtrend.models import Aggregation, Command, DatasetKind, DecadalMethod, ReportFormat

load_dotenv()

class Settings(BaseSettings):
    # Application settings
    APP_NAME: str = "climtrend"
    APP_VERSION: str = "1.0.0"
    APP_DESCRIPTION: str = "Nonparametric trend analysis for climate time series"
    ENVIRONMENT: str = "development"
    DEBUG: bool = False

    # Logging
    LOG_LEVEL: str = "INFO"

    # Statistical defaults
    DEFAULT_ALPHA: float = 0.05
    DEFAULT_CONFIDENCE: float = 0.95
    DEFAULT_AGGREGATION: Aggregation = Aggregation.DAILY_MEAN
    DEFAULT_DECADAL_METHOD: DecadalMethod = DecadalMethod.DECADE_MEAN
    SHAPIRO_MAX_N: int = 5000
    SIGNIFICANT_DIGITS: int = 6

    # Cleaning rules
    TEMPERATURE_MIN_C: float = -90.0
    TEMPERATURE_MAX_C: float = 60.0
    NULL_TOKENS: List[str] = ["", "NA", "N/A", "NaN", "nan", "null", "NULL"]

    # Coverage thresholds (observations per year)
    MIN_DAILY_OBSERVATIONS: int = 300
    MIN_HOURLY_OBSERVATIONS: int = 7000

    # Region-wide (CCKP) layout
    REGION_COLUMN: str = "state"
    REGION_IGNORE_COLUMNS: List[str] = ["period"]

    # Station (NREL) layout
    STATION_TIMESTAMP_COLUMN: Optional[str] = None
    STATION_YEAR_COLUMN: str = "Year"
    STATION_MONTH_COLUMN: str = "Month"
    STATION_DAY_COLUMN: str = "Day"
    STATION_HOUR_COLUMN: str = "Hour"
    STATION_MINUTE_COLUMN: Optional[str] = "Minute"
    STATION_TEMPERATURE_COLUMN: str = "Temperature"
    STATION_SKIP_ROWS: int = 0
    STATION_TIMEZONE: str = "local"

    # Worker settings
    WORKER_CONCURRENCY: int = 2

    class Config:
        env_file = ".env"
        env_prefix = "CLIMTREND_"
        case_sensitive = True

settings = Settings()


class StationColumns(BaseModel):
    """Column mapping for time-stamped station exports."""
    timestamp: Optional[str] = None
    year: str = "Year"
    month: str = "Month"
    day: str = "Day"
    hour: Optional[str] = "Hour"
    minute: Optional[str] = "Minute"
    temperature: str = "Temperature"
    skip_rows: int = Field(default=0, ge=0)

    @classmethod
    def from_settings(cls) -> "StationColumns":
        return cls(
            timestamp=settings.STATION_TIMESTAMP_COLUMN,
            year=settings.STATION_YEAR_COLUMN,
            month=settings.STATION_MONTH_COLUMN,
            day=settings.STATION_DAY_COLUMN,
            hour=settings.STATION_HOUR_COLUMN,
            minute=settings.STATION_MINUTE_COLUMN,
            temperature=settings.STATION_TEMPERATURE_COLUMN,
            skip_rows=settings.STATION_SKIP_ROWS,
        )


class RegionColumns(BaseModel):
    """Column mapping for region x year wide tables."""
    region: str = "state"
    ignore: List[str] = ["period"]

    @classmethod
    def from_settings(cls) -> "RegionColumns":
        return cls(region=settings.REGION_COLUMN, ignore=list(settings.REGION_IGNORE_COLUMNS))


class RunConfig(BaseModel):
    """Fully resolved configuration of one CLI invocation."""
    command: Command
    inputs: List[Path]
    kind: DatasetKind = DatasetKind.STATION
    alpha: float = 0.05
    confidence: float = 0.95
    aggregation: Aggregation = Aggregation.DAILY_MEAN
    end_year: Optional[int] = None
    decadal_method: DecadalMethod = DecadalMethod.DECADE_MEAN
    out: Path = Path("out")
    formats: List[ReportFormat] = [ReportFormat.JSON]
    station_id: Optional[str] = None
    station_columns: StationColumns = Field(default_factory=StationColumns)
    region_columns: RegionColumns = Field(default_factory=RegionColumns)
    min_daily_observations: int = Field(default=300, ge=0)
    min_hourly_observations: int = Field(default=7000, ge=0)

    @field_validator("alpha", "confidence")
    @classmethod
    def _open_unit_interval(cls, value: float) -> float:
        if not 0.0 < value < 1.0:
            raise ValueError("must lie strictly between 0 and 1")
        return value

    @field_validator("inputs")
    @classmethod
    def _inputs_present(cls, value: List[Path]) -> List[Path]:
        if not value or any(str(path).strip() == "" for path in value):
            raise ValueError("at least one non-empty input path is required")
        return value

    @field_validator("formats")
    @classmethod
    def _formats_present(cls, value: List[ReportFormat]) -> List[ReportFormat]:
        if not value:
            raise ValueError("at least one output format is required")
        # Keep first occurrence order
        return list(dict.fromkeys(value))

    @model_validator(mode="after")
    def _kind_matches_command(self) -> "RunConfig":
        if self.command == Command.REGIONS and self.kind != DatasetKind.REGION_WIDE:
            raise ValueError("the regions command needs region-wide input")
        return self

    def coverage_minimum(self) -> int:
        """Observations a year needs at the configured aggregation to count as covered."""
        if self.aggregation == Aggregation.DAILY_MEAN:
            return self.min_daily_observations
        return self.min_hourly_observations

    def parameters(self) -> Dict[str, Any]:
        """Parameters recorded into report metadata."""
        return {
            "alpha": self.alpha,
            "confidence": self.confidence,
            "aggregation": self.aggregation.value,
            "kind": self.kind.value,
            "end_year": self.end_year,
            "decadal_method": self.decadal_method.value,
        }


# Config-file keys mapped to RunConfig fields (or column mapping fields)
_RUN_KEYS = {
    "input": "inputs",
    "inputs": "inputs",
    "kind": "kind",
    "alpha": "alpha",
    "confidence": "confidence",
    "aggregation": "aggregation",
    "end_year": "end_year",
    "decadal_method": "decadal_method",
    "out": "out",
    "format": "formats",
    "formats": "formats",
    "station_id": "station_id",
    "min_daily_observations": "min_daily_observations",
    "min_hourly_observations": "min_hourly_observations",
}
_STATION_KEYS = {
    "timestamp_column": "timestamp",
    "year_column": "year",
    "month_column": "month",
    "day_column": "day",
    "hour_column": "hour",
    "minute_column": "minute",
    "temperature_column": "temperature",
    "skip_rows": "skip_rows",
}
_REGION_KEYS = {
    "region_column": "region",
    "ignore_columns": "ignore",
}
_LIST_FIELDS = {"inputs", "formats", "ignore"}


def read_config_file(path: Path) -> Dict[str, Optional[str]]:
    """
    Read a flat key=value file. Keys are case-insensitive, dashes equal underscores.
    """
    if not path.is_file():
        raise ConfigurationError(f"config file not found: {path}")
    values = dotenv_values(path)
    return {key.strip().lower().replace("-", "_"): value for key, value in values.items()}


def _split(value: Any) -> List[str]:
    if isinstance(value, (list, tuple)):
        return [str(item).strip() for item in value if str(item).strip()]
    return [item.strip() for item in str(value).split(",") if item.strip()]


def _apply(layer: Mapping[str, Any], run: Dict[str, Any], station: Dict[str, Any], region: Dict[str, Any], source: str):
    for key, value in layer.items():
        if value is None:
            continue
        if key in _RUN_KEYS:
            target, field = run, _RUN_KEYS[key]
        elif key in _STATION_KEYS:
            target, field = station, _STATION_KEYS[key]
        elif key in _REGION_KEYS:
            target, field = region, _REGION_KEYS[key]
        else:
            raise ConfigurationError(f"unknown {source} key: {key}")
        if field in _LIST_FIELDS:
            value = _split(value)
        elif isinstance(value, str) and value.strip().lower() in ("", "none") and field in ("timestamp", "hour", "minute", "end_year", "station_id"):
            value = None
        target[field] = value


def load_run_config(
    command: str,
    overrides: Optional[Mapping[str, Any]] = None,
    config_file: Optional[Path] = None,
) -> RunConfig:
    """
    Resolve the run configuration: settings defaults, then the config file, then flags.
    """
    run: Dict[str, Any] = {
        "command": command,
        "alpha": settings.DEFAULT_ALPHA,
        "confidence": settings.DEFAULT_CONFIDENCE,
        "aggregation": settings.DEFAULT_AGGREGATION,
        "decadal_method": settings.DEFAULT_DECADAL_METHOD,
        "min_daily_observations": settings.MIN_DAILY_OBSERVATIONS,
        "min_hourly_observations": settings.MIN_HOURLY_OBSERVATIONS,
        "kind": DatasetKind.REGION_WIDE if command == Command.REGIONS.value else DatasetKind.STATION,
    }
    station = StationColumns.from_settings().model_dump()
    region = RegionColumns.from_settings().model_dump()

    if config_file is not None:
        _apply(read_config_file(Path(config_file)), run, station, region, "config file")
    if overrides:
        _apply(overrides, run, station, region, "flag")

    try:
        return RunConfig(
            **run,
            station_columns=StationColumns(**station),
            region_columns=RegionColumns(**region),
        )
    except ValueError as e:
        # pydantic.ValidationError is a ValueError subclass
        raise ConfigurationError(f"invalid configuration: {e}") from e
