from typing import List, Tuple

from climtrend.commands.common import load_region_tables, read_inputs, write_artifacts
from climtrend.config import RunConfig
from climtrend.exceptions import CoverageError, InputValidationError, SampleSizeError
from climtrend.ingestion import cleaning_report
from climtrend.logger import log_command, logger
from climtrend.report import render_cleaning_report, render_region_ranking
from climtrend.schemas import RegionChange
from climtrend.timeseries import decadal_change, mean_change, rank_regions
from climtrend.worker import map_concurrently

RANKING_FILE = "region_ranking.csv"


@log_command
def cmd_regions(config: RunConfig) -> List[RegionChange]:
    """
    Decadal change per region, ranked by warming.
    """
    blobs = read_inputs(config)
    tables = load_region_tables(config, blobs)

    items: List[Tuple[str, List[Tuple[int, float]]]] = []
    for table in tables:
        items.extend((region, table.series(region)) for region in table.regions)
    if not items:
        raise SampleSizeError("no regions in input")

    regions = [region for region, _ in items]
    if len(set(regions)) != len(regions):
        duplicated = sorted({r for r in regions if regions.count(r) > 1})
        raise InputValidationError(f"regions appear in more than one input: {duplicated}")

    # Latest year present in the inputs unless one is given
    end_year = config.end_year
    if end_year is None:
        end_year = max(table.years[-1] for table in tables if table.years)
        logger.info("End year defaulted to the latest year in the input", end_year=end_year)

    def change_for(item: Tuple[str, List[Tuple[int, float]]]) -> RegionChange:
        region, series = item
        try:
            change = decadal_change(series, end_year, method=config.decadal_method)
        except CoverageError as e:
            raise CoverageError(f"region {region} lacks coverage for the decades ending {end_year}", e.missing) from e
        return RegionChange(region=region, change=change)

    ranked = rank_regions(map_concurrently(change_for, items))
    logger.info(
        "Regions ranked",
        regions=len(ranked),
        top=ranked[0].region,
        bottom=ranked[-1].region,
        mean_change=mean_change(ranked),
    )

    artifacts = [(RANKING_FILE, render_region_ranking(ranked))]
    for (path, _), table in zip(blobs, tables):
        artifacts.append((f"cleaning_report_{path.stem}.json", render_cleaning_report(cleaning_report(table))))
    write_artifacts(config, artifacts)
    return ranked
