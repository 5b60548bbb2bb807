"""
Climate time-series model: season classification, annual and seasonal
aggregation, decadal change and regional ranking.
"""
import math
from datetime import date, datetime
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from climtrend.exceptions import CoverageError, InputValidationError, SampleSizeError
from climtrend.logger import logger
from climtrend.models import DecadalMethod, Season
from climtrend.schemas import AnnualSummary, Observation, RegionChange, SeasonLabel
from climtrend.stats import as_sample, standardized_anomalies, theil_sen_slope

# The named seasons (Winter Dec-Feb, Summer Apr-Jun, Monsoon Jul-Sep,
# PostMonsoon Oct-Nov) leave March out. Every month must map to a season,
# so March is counted as Summer and Summer here means Mar-Jun, not Apr-Jun.
SEASON_BY_MONTH = {
    12: Season.WINTER, 1: Season.WINTER, 2: Season.WINTER,
    3: Season.SUMMER, 4: Season.SUMMER, 5: Season.SUMMER, 6: Season.SUMMER,
    7: Season.MONSOON, 8: Season.MONSOON, 9: Season.MONSOON,
    10: Season.POST_MONSOON, 11: Season.POST_MONSOON,
}

DECADE = 10


def classify_season(timestamp: Union[date, datetime]) -> SeasonLabel:
    """
    Season of a calendar date. December belongs to the following year's winter.
    """
    season = SEASON_BY_MONTH[timestamp.month]
    season_year = timestamp.year + 1 if timestamp.month == 12 else timestamp.year
    return SeasonLabel(season=season, season_year=season_year)


def _frame(observations: Sequence[Observation], operation: str) -> pd.DataFrame:
    if not observations:
        raise SampleSizeError(f"{operation} needs at least one observation")
    return pd.DataFrame(
        {
            "timestamp": pd.to_datetime([o.timestamp for o in observations]),
            "value": np.asarray([o.value for o in observations], dtype=np.float64),
        }
    )


def aggregate_annual(observations: Sequence[Observation]) -> List[AnnualSummary]:
    """
    Per calendar year: max, min, sample standard deviation (n-1) and count.
    """
    df = _frame(observations, "annual aggregation")
    grouped = df.groupby(df["timestamp"].dt.year)["value"]
    table = grouped.agg(["max", "min", "std", "count"]).sort_index()

    summaries = []
    for year, row in table.iterrows():
        # Single observations and constant years have zero spread
        std_dev = 0.0 if row["count"] < 2 or row["max"] == row["min"] else float(row["std"])
        summaries.append(
            AnnualSummary(
                year=int(year),
                t_max=float(row["max"]),
                t_min=float(row["min"]),
                std_dev=std_dev,
                count=int(row["count"]),
            )
        )
    logger.debug("Annual aggregation", years=len(summaries), observations=len(df))
    return summaries


def filter_covered_years(summaries: Iterable[AnnualSummary], minimum: int) -> List[AnnualSummary]:
    """Drop years with fewer than `minimum` observations."""
    return [summary for summary in summaries if summary.count >= minimum]


def daily_means(observations: Sequence[Observation]) -> List[Observation]:
    """Arithmetic mean of each calendar day, stamped at midnight."""
    df = _frame(observations, "daily aggregation")
    means = df.groupby(df["timestamp"].dt.normalize())["value"].mean().sort_index()
    return [Observation(timestamp=ts.to_pydatetime(), value=float(v)) for ts, v in means.items()]


def annual_means(observations: Sequence[Observation]) -> List[Tuple[int, float]]:
    """(year, mean) pairs in ascending year order."""
    df = _frame(observations, "annual means")
    means = df.groupby(df["timestamp"].dt.year)["value"].mean().sort_index()
    return [(int(year), float(value)) for year, value in means.items()]


def aggregate_seasonal(observations: Sequence[Observation]) -> Dict[SeasonLabel, float]:
    """
    Mean value per (season, season_year), ordered by season year then season.
    """
    if not observations:
        raise SampleSizeError("seasonal aggregation needs at least one observation")

    sums: Dict[SeasonLabel, List[float]] = {}
    for observation in observations:
        sums.setdefault(classify_season(observation.timestamp), []).append(observation.value)

    ordered = sorted(sums, key=SeasonLabel.sort_key)
    return {label: math.fsum(sums[label]) / len(sums[label]) for label in ordered}


def seasonal_change(seasonal: Dict[SeasonLabel, float]) -> Dict[SeasonLabel, float]:
    """Each seasonal mean minus that season's mean over all season years."""
    by_season: Dict[Season, List[float]] = {}
    for label, value in seasonal.items():
        by_season.setdefault(label.season, []).append(value)
    climatology = {season: math.fsum(values) / len(values) for season, values in by_season.items()}

    ordered = sorted(seasonal, key=SeasonLabel.sort_key)
    return {label: seasonal[label] - climatology[label.season] for label in ordered}


def _year_map(annual: Sequence[Tuple[int, float]]) -> Dict[int, float]:
    years: Dict[int, float] = {}
    for year, value in annual:
        year = int(year)
        if year in years:
            raise InputValidationError(f"duplicate annual mean for year {year}")
        if not math.isfinite(value):
            raise InputValidationError(f"annual mean for {year} is not finite")
        years[year] = float(value)
    return years


def decadal_change(
    annual: Sequence[Tuple[int, float]],
    end_year: int,
    method: DecadalMethod = DecadalMethod.DECADE_MEAN,
) -> float:
    """
    Change over the decade ending at end_year.

    decade-mean: mean of [end-9, end] minus mean of [end-19, end-10].
    sen-slope:   Theil-Sen slope over the 20-year window times ten.
    endpoint:    end_year value minus the end-19 value.
    """
    years = _year_map(annual)
    window = list(range(end_year - 2 * DECADE + 1, end_year + 1))
    missing = [year for year in window if year not in years]
    if missing:
        raise CoverageError(f"decadal change ending {end_year} needs years {window[0]}-{window[-1]}", missing)

    if method == DecadalMethod.DECADE_MEAN:
        earlier = math.fsum(years[y] for y in window[:DECADE]) / DECADE
        later = math.fsum(years[y] for y in window[DECADE:]) / DECADE
        return later - earlier
    if method == DecadalMethod.SEN_SLOPE:
        sample = as_sample([years[y] for y in window], times=window)
        return theil_sen_slope(sample) * DECADE
    if method == DecadalMethod.ENDPOINT:
        return years[window[-1]] - years[window[0]]
    raise InputValidationError(f"unknown decadal method: {method}")


def annual_change(
    annual: Sequence[Tuple[int, float]],
    baseline: Optional[Tuple[int, int]] = None,
) -> List[Tuple[int, float, float]]:
    """
    (year, change, standardized anomaly) per year, where change is the departure
    from the mean over the inclusive baseline years (default: every year).
    """
    years = _year_map(annual)
    if len(years) < 2:
        raise SampleSizeError("annual change needs at least two years")
    ordered = sorted(years)

    if baseline is None:
        reference = [years[y] for y in ordered]
    else:
        reference = [years[y] for y in ordered if baseline[0] <= y <= baseline[1]]
        if not reference:
            raise CoverageError("baseline has no annual means", range(baseline[0], baseline[1] + 1))
    base = math.fsum(reference) / len(reference)

    anomalies = standardized_anomalies([years[y] for y in ordered]).anomalies
    return [(year, years[year] - base, anomaly) for year, anomaly in zip(ordered, anomalies)]


def rank_regions(changes: Sequence[RegionChange]) -> List[RegionChange]:
    """Descending by change; equal changes ordered by region name."""
    if not changes:
        raise SampleSizeError("ranking needs at least one region")
    seen = set()
    for change in changes:
        if change.region in seen:
            raise InputValidationError(f"duplicate region in ranking: {change.region}")
        seen.add(change.region)
    return sorted(changes, key=lambda c: (-c.change, c.region))


def mean_change(changes: Sequence[RegionChange]) -> float:
    """Average change across regions."""
    if not changes:
        raise SampleSizeError("mean change needs at least one region")
    return math.fsum(c.change for c in changes) / len(changes)
