from typing import Dict, List

from climtrend.commands.common import (
    cleaning_artifact,
    load_station_records,
    read_inputs,
    require_station,
    station_observations,
    write_artifacts,
)
from climtrend.config import RunConfig
from climtrend.exceptions import DegenerateError
from climtrend.logger import log_command, logger
from climtrend.models import PlotKind
from climtrend.report import emit_plot_data, render_annual_summary
from climtrend.schemas import Observation, SeasonLabel
from climtrend.timeseries import (
    aggregate_annual,
    aggregate_seasonal,
    annual_change,
    annual_means,
    filter_covered_years,
    seasonal_change,
)

SEASONAL_FILE = "seasonal.csv"
SEASONAL_CHANGE_FILE = "seasonal_change.csv"
ANNUAL_SUMMARY_FILE = "annual_summary.csv"
ANNUAL_CHANGE_FILE = "annual_change.csv"


def _covered_years(config: RunConfig, observations: List[Observation]) -> List[int]:
    """Years with enough observations at the configured aggregation."""
    minimum = config.coverage_minimum()
    aggregated = aggregate_annual(observations)
    covered = [s.year for s in filter_covered_years(aggregated, minimum)]
    short = sorted({s.year for s in aggregated} - set(covered))
    if short:
        logger.warning("Years below the coverage minimum", years=short, minimum=minimum,
                       aggregation=config.aggregation.value)
    return covered


@log_command
def cmd_seasonal(config: RunConfig) -> Dict[SeasonLabel, float]:
    """
    Seasonal means and their departures, the annual summary table, and the
    year-wise change when several years are present.

    Annual extremes come from the recorded values; coverage is counted at the
    configured aggregation.
    """
    require_station(config)
    blobs = read_inputs(config)
    record_set = load_station_records(config, blobs)
    observations = station_observations(config, record_set)

    seasonal = aggregate_seasonal(observations)
    artifacts = [
        (SEASONAL_FILE, emit_plot_data(PlotKind.SEASONAL, seasonal)),
        (SEASONAL_CHANGE_FILE, emit_plot_data(PlotKind.SEASONAL_CHANGE, seasonal_change(seasonal))),
    ]

    summaries = aggregate_annual(record_set.records)
    covered = _covered_years(config, observations)
    artifacts.append((ANNUAL_SUMMARY_FILE, render_annual_summary(summaries, covered)))

    annual = annual_means(observations)
    if len(annual) >= 2:
        try:
            artifacts.append((ANNUAL_CHANGE_FILE, emit_plot_data(PlotKind.ANNUAL_CHANGE, annual_change(annual))))
        except DegenerateError:
            logger.warning("Annual means are constant; annual change not emitted", years=len(annual))

    logger.info("Seasons aggregated", groups=len(seasonal), years=len(annual), covered_years=len(covered))
    artifacts.append(cleaning_artifact(record_set))
    write_artifacts(config, artifacts)
    return seasonal
