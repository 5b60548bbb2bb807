from typing import Optional

from climtrend.commands.common import analysis_series, cleaning_artifact, input_hash, read_inputs, write_artifacts
from climtrend.config import RunConfig, settings
from climtrend.distributions import shapiro_wilk
from climtrend.exceptions import DegenerateError
from climtrend.logger import log_command, logger
from climtrend.models import ReportFormat
from climtrend.report import build_trend_report, render_trend_report
from climtrend.schemas import NormalityResult, Sample, TrendReport
from climtrend.stats import mann_kendall, sen_estimate

REPORT_FILES = {
    ReportFormat.JSON: "trend_report.json",
    ReportFormat.CSV: "trend_report.csv",
    ReportFormat.TEXT: "trend_report.txt",
}

# Pairwise slopes beyond this are held in memory all at once
LARGE_PAIR_COUNT = 50_000_000


def _normality(sample: Sample, alpha: float) -> Optional[NormalityResult]:
    if sample.n > settings.SHAPIRO_MAX_N:
        logger.warning(
            "Sample too large for Shapiro-Wilk; normality not reported",
            n=sample.n,
            limit=settings.SHAPIRO_MAX_N,
        )
        return None
    result = shapiro_wilk(sample)
    if result.is_normal_at(alpha):
        logger.warning(
            "Normality not rejected; parametric trend tests may also apply",
            w=result.w,
            p_value=result.p_value,
        )
    return result


@log_command
def cmd_trend(config: RunConfig) -> TrendReport:
    """
    Normality check, then Mann-Kendall and Theil-Sen on one series.
    """
    blobs = read_inputs(config)
    series, parsed = analysis_series(config, blobs)
    sample = series.sample
    if sample.n > 1 and min(sample.values) == max(sample.values):
        raise DegenerateError(f"series {series.name} is constant ({sample.values[0]}); no trend can be estimated")

    normality = _normality(sample, config.alpha)
    trend = mann_kendall(sample, alpha=config.alpha)
    if sample.n * (sample.n - 1) // 2 > LARGE_PAIR_COUNT:
        logger.warning("Large Theil-Sen pair set; consider daily-mean aggregation", n=sample.n)
    sen = sen_estimate(sample, confidence=config.confidence)

    report = build_trend_report(
        name=series.name,
        kind=config.kind,
        trend=trend,
        sen=sen,
        normality=normality,
        input_sha256=input_hash(blobs),
        parameters=config.parameters(),
        station_id=series.station_id,
        start=series.start,
        end=series.end,
    )
    logger.info(
        "Trend computed",
        n=trend.n,
        z=trend.z,
        p_two_sided=trend.p_two_sided,
        trend=trend.trend.value,
        slope=sen.slope,
    )

    artifacts = [(REPORT_FILES[fmt], render_trend_report(report, fmt)) for fmt in config.formats]
    artifacts.append(cleaning_artifact(parsed))
    write_artifacts(config, artifacts)
    return report
