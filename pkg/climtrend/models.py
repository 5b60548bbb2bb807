import enum


class Season(str, enum.Enum):
    SUMMER = "Summer"
    MONSOON = "Monsoon"
    POST_MONSOON = "PostMonsoon"
    WINTER = "Winter"

    @property
    def order(self) -> int:
        """Position within a season year (winter opens it)."""
        return _SEASON_ORDER[self]


_SEASON_ORDER = {
    Season.WINTER: 0,
    Season.SUMMER: 1,
    Season.MONSOON: 2,
    Season.POST_MONSOON: 3,
}


class Trend(str, enum.Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"
    NO_TREND = "no trend"


class DatasetKind(str, enum.Enum):
    REGION_WIDE = "region-wide"
    STATION = "station"


class Aggregation(str, enum.Enum):
    DAILY_MEAN = "daily-mean"
    HOURLY_RAW = "hourly-raw"


class DecadalMethod(str, enum.Enum):
    DECADE_MEAN = "decade-mean"
    SEN_SLOPE = "sen-slope"
    ENDPOINT = "endpoint"


class ReportFormat(str, enum.Enum):
    JSON = "json"
    CSV = "csv"
    TEXT = "text"


class PlotKind(str, enum.Enum):
    QQ = "qq"
    SEASONAL = "seasonal"
    ANNUAL_CHANGE = "annual-change"
    SEASONAL_CHANGE = "seasonal-change"


class DefectKind(str, enum.Enum):
    DUPLICATE = "duplicate"
    NULL = "null"
    REJECTED = "rejected"
    CONFLICT = "conflict"


class Command(str, enum.Enum):
    TREND = "trend"
    REGIONS = "regions"
    SEASONAL = "seasonal"
    NORMALITY = "normality"
