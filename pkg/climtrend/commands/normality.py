from typing import Tuple

from climtrend.commands.common import analysis_series, cleaning_artifact, input_hash, read_inputs, write_artifacts
from climtrend.config import RunConfig
from climtrend.distributions import qq_points, shapiro_wilk
from climtrend.logger import log_command, logger
from climtrend.models import PlotKind
from climtrend.report import emit_plot_data, render_normality_report, report_metadata
from climtrend.schemas import NormalityResult, QQData

NORMALITY_FILE = "normality.json"
QQ_FILE = "qq.csv"


@log_command
def cmd_normality(config: RunConfig) -> Tuple[NormalityResult, QQData]:
    blobs = read_inputs(config)
    series, parsed = analysis_series(config, blobs, timed=False)

    result = shapiro_wilk(series.sample)
    qq = qq_points(series.sample)
    if result.is_normal_at(config.alpha):
        logger.warning(
            "Normality not rejected; parametric trend tests may also apply",
            w=result.w,
            p_value=result.p_value,
        )
    logger.info("Normality assessed", n=result.n, w=result.w, p_value=result.p_value, qq_correlation=qq.correlation)

    write_artifacts(
        config,
        [
            (NORMALITY_FILE, render_normality_report(
                result, qq, config.alpha, metadata=report_metadata(input_hash(blobs), config.parameters())
            )),
            (QQ_FILE, emit_plot_data(PlotKind.QQ, qq)),
            cleaning_artifact(parsed),
        ],
    )
    return result, qq
