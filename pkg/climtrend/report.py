"""
Serialization of analysis results: trend reports (json, csv, text) and
plot-ready CSV files.
"""
import hashlib
import io
import json
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import pandas as pd

from climtrend.config import settings
from climtrend.exceptions import InputValidationError
from climtrend.models import DatasetKind, PlotKind, ReportFormat
from climtrend.schemas import (
    AnnualSummary,
    CleaningReport,
    DatasetDescriptor,
    NormalityResult,
    QQData,
    RegionChange,
    ReportMetadata,
    SeasonLabel,
    SenEstimate,
    TrendReport,
    TrendTestResult,
)

# Documented flat keys of the JSON trend report
REPORT_KEYS = [
    "s", "var_s", "z", "p_two_sided", "tau_a", "tau_b", "h", "alpha",
    "slope", "intercept", "ci_lower", "ci_upper", "sw_w", "sw_p",
]

PLOT_COLUMNS = {
    PlotKind.QQ: ["theoretical", "sample"],
    PlotKind.SEASONAL: ["season_year", "season", "mean_c"],
    PlotKind.ANNUAL_CHANGE: ["year", "change_c", "anomaly"],
    PlotKind.SEASONAL_CHANGE: ["season_year", "season", "change_c"],
}

ANNUAL_SUMMARY_COLUMNS = ["year", "t_max", "t_min", "std_dev", "count", "covered"]


def _digits() -> int:
    return settings.SIGNIFICANT_DIGITS


def significant(value: Any) -> Any:
    """Round floats to the configured significant digits; other types pass through."""
    if isinstance(value, bool) or not isinstance(value, float):
        return value
    return float(f"{value:.{_digits()}g}")


def _text(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, float):
        return f"{value:.{_digits()}g}"
    return str(value)


def _to_csv(frame: pd.DataFrame) -> bytes:
    return frame.to_csv(index=False, lineterminator="\n", float_format=f"%.{_digits()}g").encode("utf-8")


def hash_inputs(blobs: Iterable[bytes]) -> str:
    """SHA-256 over the raw input bytes, in order."""
    digest = hashlib.sha256()
    for blob in blobs:
        digest.update(blob)
    return digest.hexdigest()


def report_metadata(input_sha256: str, parameters: Mapping[str, Any]) -> ReportMetadata:
    """Tool identity, input hash and resolved run parameters."""
    return ReportMetadata(
        tool=settings.APP_NAME,
        version=settings.APP_VERSION,
        input_sha256=input_sha256,
        parameters=dict(parameters),
    )


def build_trend_report(
    name: str,
    kind: DatasetKind,
    trend: TrendTestResult,
    sen: SenEstimate,
    normality: Optional[NormalityResult],
    input_sha256: str,
    parameters: Mapping[str, Any],
    station_id: Optional[str] = None,
    start: Optional[str] = None,
    end: Optional[str] = None,
) -> TrendReport:
    return TrendReport(
        dataset=DatasetDescriptor(
            name=name, kind=kind, n=trend.n, station_id=station_id, start=start, end=end,
        ),
        trend=trend,
        sen=sen,
        normality=normality,
        metadata=report_metadata(input_sha256, parameters),
    )


def report_fields(report: TrendReport) -> Dict[str, Any]:
    """Flat result fields, unrounded."""
    trend, sen, normality = report.trend, report.sen, report.normality
    return {
        "n": trend.n,
        "s": trend.s,
        "var_s": trend.var_s,
        "z": trend.z,
        "p_two_sided": trend.p_two_sided,
        "tau_a": trend.tau_a,
        "tau_b": trend.tau_b,
        "h": trend.h,
        "alpha": trend.alpha,
        "trend": trend.trend.value,
        "slope": sen.slope,
        "intercept": sen.intercept,
        "ci_lower": sen.ci_lower,
        "ci_upper": sen.ci_upper,
        "confidence": sen.confidence,
        "n_pairs": sen.n_pairs,
        "sw_w": normality.w if normality else None,
        "sw_p": normality.p_value if normality else None,
    }


def _render_json(report: TrendReport) -> bytes:
    payload = {key: significant(value) for key, value in report_fields(report).items()}
    payload["dataset"] = report.dataset.model_dump(mode="json")
    payload["metadata"] = report.metadata.model_dump(mode="json")
    return (json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def _render_csv(report: TrendReport) -> bytes:
    fields = report_fields(report)
    frame = pd.DataFrame(
        {"parameter": list(fields), "value": [_text(value) for value in fields.values()]}
    )
    return _to_csv(frame)


_TABLE_ROWS = [
    ("h", "Hypothesis (trend present)", "h"),
    ("p", "Evidence against the null hypothesis", "p_two_sided"),
    ("z", "Strength of the evidence against the null hypothesis", "z"),
    ("τ", "Movement in the variable over the observed time frame", "tau_b"),
]


def _render_text(report: TrendReport) -> bytes:
    fields = report_fields(report)
    dataset = report.dataset
    out = io.StringIO()
    out.write("Mann-Kendall Test Result\n")
    out.write(f"dataset: {dataset.name} ({dataset.kind.value}, n={dataset.n})\n")
    if dataset.start or dataset.end:
        out.write(f"period: {dataset.start or '?'} to {dataset.end or '?'}\n")
    out.write("\n")
    out.write(f"{'Parameter':<10} {'Significance':<56} Value\n")
    for label, meaning, key in _TABLE_ROWS:
        out.write(f"{label:<10} {meaning:<56} {_text(fields[key])}\n")
    out.write(f"{'τ-a':<10} {'Kendall tau without tie correction':<56} {_text(fields['tau_a'])}\n")
    out.write(f"{'S':<10} {'Mann-Kendall statistic':<56} {_text(fields['s'])}\n")
    out.write(f"{'Var(S)':<10} {'Tie-corrected variance of S':<56} {_text(fields['var_s'])}\n")
    out.write(f"{'alpha':<10} {'Significance level':<56} {_text(fields['alpha'])}\n")
    out.write("\n")
    out.write("Theil-Sen estimate\n")
    out.write(f"slope: {_text(fields['slope'])}\n")
    out.write(f"intercept: {_text(fields['intercept'])}\n")
    out.write(
        f"{_text(fields['confidence'] * 100)}% interval: "
        f"[{_text(fields['ci_lower'])}, {_text(fields['ci_upper'])}]\n"
    )
    out.write("\n")
    out.write("Shapiro-Wilk normality\n")
    out.write(f"W: {_text(fields['sw_w'])}\n")
    out.write(f"p: {_text(fields['sw_p'])}\n")
    return out.getvalue().encode("utf-8")


_RENDERERS = {
    ReportFormat.JSON: _render_json,
    ReportFormat.CSV: _render_csv,
    ReportFormat.TEXT: _render_text,
}


def render_trend_report(report: TrendReport, fmt: Union[ReportFormat, str]) -> bytes:
    """
    Deterministic serialization of a trend report in json, csv or text.
    """
    try:
        fmt = ReportFormat(fmt)
    except ValueError:
        raise InputValidationError(f"unknown report format: {fmt!r}")
    return _RENDERERS[fmt](report)


# Plot data
def _qq_frame(data: Any) -> pd.DataFrame:
    if not isinstance(data, QQData):
        raise InputValidationError("qq plot data must be QQData")
    points = sorted(data.points)
    return pd.DataFrame(points, columns=PLOT_COLUMNS[PlotKind.QQ])


def _season_rows(data: Any, kind: PlotKind) -> pd.DataFrame:
    if not isinstance(data, Mapping) or not all(isinstance(key, SeasonLabel) for key in data):
        raise InputValidationError(f"{kind.value} plot data must map SeasonLabel to a value")
    rows = [
        (label.season_year, label.season.value, float(data[label]))
        for label in sorted(data, key=SeasonLabel.sort_key)
    ]
    return pd.DataFrame(rows, columns=PLOT_COLUMNS[kind])


def _seasonal_frame(data: Any) -> pd.DataFrame:
    return _season_rows(data, PlotKind.SEASONAL)


def _seasonal_change_frame(data: Any) -> pd.DataFrame:
    return _season_rows(data, PlotKind.SEASONAL_CHANGE)


def _annual_change_frame(data: Any) -> pd.DataFrame:
    if isinstance(data, (Mapping, QQData, str, bytes)) or not isinstance(data, Sequence):
        raise InputValidationError("annual-change plot data must be (year, change, anomaly) rows")
    rows: List[Tuple[int, float, float]] = []
    for row in data:
        if not isinstance(row, (tuple, list)) or len(row) != 3:
            raise InputValidationError("annual-change plot data must be (year, change, anomaly) rows")
        rows.append((int(row[0]), float(row[1]), float(row[2])))
    rows.sort(key=lambda r: r[0])
    return pd.DataFrame(rows, columns=PLOT_COLUMNS[PlotKind.ANNUAL_CHANGE])


_PLOT_FRAMES = {
    PlotKind.QQ: _qq_frame,
    PlotKind.SEASONAL: _seasonal_frame,
    PlotKind.ANNUAL_CHANGE: _annual_change_frame,
    PlotKind.SEASONAL_CHANGE: _seasonal_change_frame,
}


def emit_plot_data(kind: Union[PlotKind, str], data: Any) -> bytes:
    """
    Plot-ready CSV with a header row, rows ordered by x coordinate.
    """
    try:
        kind = PlotKind(kind)
    except ValueError:
        raise InputValidationError(f"unknown plot kind: {kind!r}")
    return _to_csv(_PLOT_FRAMES[kind](data))


def render_region_ranking(changes: Sequence[RegionChange]) -> bytes:
    """rank,region,change_c in the given (already ranked) order."""
    frame = pd.DataFrame(
        [(rank, change.region, change.change) for rank, change in enumerate(changes, start=1)],
        columns=["rank", "region", "change_c"],
    )
    return _to_csv(frame)


def render_annual_summary(summaries: Sequence[AnnualSummary], covered_years: Iterable[int]) -> bytes:
    """
    Per-year extremes and spread, with a flag for years meeting the coverage minimum.
    """
    covered = set(covered_years)
    frame = pd.DataFrame(
        [
            (s.year, s.t_max, s.t_min, s.std_dev, s.count, s.year in covered)
            for s in sorted(summaries, key=lambda s: s.year)
        ],
        columns=ANNUAL_SUMMARY_COLUMNS,
    )
    return _to_csv(frame)


def render_normality_report(
    result: NormalityResult,
    qq: QQData,
    alpha: Optional[float] = None,
    metadata: Optional[ReportMetadata] = None,
) -> bytes:
    alpha = settings.DEFAULT_ALPHA if alpha is None else alpha
    payload = {
        "n": result.n,
        "sw_w": significant(result.w),
        "sw_p": significant(result.p_value),
        "alpha": alpha,
        "normal_at_alpha": result.is_normal_at(alpha),
        "qq_correlation": significant(qq.correlation),
    }
    if metadata is not None:
        payload["metadata"] = metadata.model_dump(mode="json")
    return (json.dumps(payload, sort_keys=True, indent=2) + "\n").encode("utf-8")


def render_cleaning_report(report: CleaningReport) -> bytes:
    return (json.dumps(report.model_dump(mode="json"), sort_keys=True, indent=2) + "\n").encode("utf-8")
