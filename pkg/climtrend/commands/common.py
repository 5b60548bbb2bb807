from datetime import timedelta
from pathlib import Path
from typing import List, NamedTuple, Optional, Tuple, Union

from climtrend.config import RunConfig
from climtrend.exceptions import ConfigurationError, InputValidationError, SampleSizeError
from climtrend.ingestion import cleaning_report, merge_station_records, parse_region_wide_csv, parse_station_csv
from climtrend.logger import logger
from climtrend.models import Aggregation, DatasetKind
from climtrend.report import hash_inputs, render_cleaning_report
from climtrend.schemas import Observation, RegionWideTable, Sample, StationRecordSet
from climtrend.stats import as_sample
from climtrend.timeseries import daily_means

Inputs = List[Tuple[Path, bytes]]


class AnalysisSeries(NamedTuple):
    """One series ready for the statistics, plus what the report needs to describe it."""
    name: str
    sample: Sample
    station_id: Optional[str]
    start: Optional[str]
    end: Optional[str]


def read_inputs(config: RunConfig) -> Inputs:
    """Raw bytes of every input, in the order given."""
    blobs = []
    for path in config.inputs:
        if not path.is_file():
            raise InputValidationError(f"input file not found: {path}")
        blobs.append((path, path.read_bytes()))
    logger.debug("Inputs read", files=[str(p) for p, _ in blobs], bytes=sum(len(b) for _, b in blobs))
    return blobs


def input_hash(blobs: Inputs) -> str:
    return hash_inputs(data for _, data in blobs)


def load_station_records(config: RunConfig, blobs: Inputs) -> StationRecordSet:
    station_id = config.station_id or blobs[0][0].stem
    record_sets = [
        parse_station_csv(data, columns=config.station_columns, station_id=station_id, source=str(path))
        for path, data in blobs
    ]
    merged = merge_station_records(record_sets)
    logger.info(
        "Station records loaded",
        station_id=station_id,
        rows_read=merged.rows_read,
        records=len(merged.records),
        defects=len(merged.defects),
    )
    return merged


def load_region_tables(config: RunConfig, blobs: Inputs) -> List[RegionWideTable]:
    tables = [
        parse_region_wide_csv(data, columns=config.region_columns, source=str(path))
        for path, data in blobs
    ]
    logger.info("Region tables loaded", regions=sum(len(t.regions) for t in tables))
    return tables


def station_observations(config: RunConfig, record_set: StationRecordSet) -> List[Observation]:
    """Records at the configured aggregation."""
    if not record_set.records:
        raise SampleSizeError(f"no valid records for station {record_set.station_id}")
    if config.aggregation == Aggregation.DAILY_MEAN:
        return daily_means(record_set.records)
    return list(record_set.records)


def elapsed_days(observations: List[Observation]) -> List[float]:
    """Days since the first observation, strictly increasing."""
    origin = observations[0].timestamp
    times = [(o.timestamp - origin) / timedelta(days=1) for o in observations]
    for i in range(1, len(times)):
        if times[i] <= times[i - 1]:
            raise InputValidationError(
                f"records share the timestamp {observations[i].timestamp.isoformat()}; "
                "conflicting hourly records need daily-mean aggregation"
            )
    return times


def _region_series(config: RunConfig, blobs: Inputs) -> Tuple[AnalysisSeries, RegionWideTable]:
    if len(blobs) > 1:
        raise ConfigurationError("region-wide analysis reads a single table")
    table = load_region_tables(config, blobs)[0]
    if config.station_id is None:
        if len(table.regions) != 1:
            raise ConfigurationError("--station-id must name the region to analyse")
        region = table.regions[0]
    elif config.station_id in table.regions:
        region = config.station_id
    else:
        raise ConfigurationError(f"region not found in table: {config.station_id}")

    series = table.series(region)
    if not series:
        raise SampleSizeError(f"region {region} has no values")
    sample = as_sample([v for _, v in series], times=[y for y, _ in series])
    return AnalysisSeries(region, sample, region, str(series[0][0]), str(series[-1][0])), table


def analysis_series(
    config: RunConfig, blobs: Inputs, timed: bool = True
) -> Tuple[AnalysisSeries, Union[StationRecordSet, RegionWideTable]]:
    """
    The series a trend or normality command works on, and the parsed input
    it came from (for the cleaning report).

    Station series are timed in days since their first observation, so the
    Theil-Sen slope is per day; region rows use calendar years. Untimed
    station series (timed=False) keep records that share a timestamp.
    """
    if config.kind == DatasetKind.REGION_WIDE:
        return _region_series(config, blobs)

    record_set = load_station_records(config, blobs)
    observations = station_observations(config, record_set)
    sample = as_sample([o.value for o in observations], times=elapsed_days(observations) if timed else None)
    series = AnalysisSeries(
        name=record_set.station_id,
        sample=sample,
        station_id=record_set.station_id,
        start=observations[0].timestamp.isoformat(),
        end=observations[-1].timestamp.isoformat(),
    )
    return series, record_set


def require_station(config: RunConfig):
    if config.kind != DatasetKind.STATION:
        raise ConfigurationError(f"the {config.command.value} command needs station input")


def write_artifacts(config: RunConfig, artifacts: List[Tuple[str, bytes]]) -> List[Path]:
    """Write named artifacts into the output directory, in the given order."""
    config.out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, data in artifacts:
        path = config.out / name
        path.write_bytes(data)
        logger.info("Artifact written", path=str(path), bytes=len(data))
        written.append(path)
    return written


def cleaning_artifact(parsed: Union[StationRecordSet, RegionWideTable]) -> Tuple[str, bytes]:
    return "cleaning_report.json", render_cleaning_report(cleaning_report(parsed))
