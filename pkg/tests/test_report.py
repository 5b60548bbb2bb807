import csv
import io
import json

import pytest

from climtrend.distributions import qq_points, shapiro_wilk
from climtrend.exceptions import InputValidationError
from climtrend.models import DatasetKind, PlotKind, Season
from climtrend.report import (
    REPORT_KEYS,
    build_trend_report,
    emit_plot_data,
    hash_inputs,
    render_annual_summary,
    render_cleaning_report,
    render_normality_report,
    render_region_ranking,
    render_trend_report,
    report_metadata,
)
from climtrend.schemas import AnnualSummary, CleaningReport, QQData, RegionChange, SeasonLabel
from climtrend.stats import mann_kendall, sen_estimate


@pytest.fixture
def report():
    values = [25.1, 25.3, 24.9, 25.6, 25.8, 25.7, 26.1, 26.4, 26.2, 26.9]
    return build_trend_report(
        name="delhi",
        kind=DatasetKind.STATION,
        trend=mann_kendall(values),
        sen=sen_estimate(values),
        normality=shapiro_wilk(values),
        input_sha256=hash_inputs([b"fixture"]),
        parameters={"alpha": 0.05, "confidence": 0.95, "aggregation": "daily-mean"},
        station_id="delhi",
    )


def test_rendering_is_deterministic(report):
    for fmt in ("json", "csv", "text"):
        assert render_trend_report(report, fmt) == render_trend_report(report, fmt)


def test_json_keys_and_precision(report):
    payload = json.loads(render_trend_report(report, "json"))
    assert set(REPORT_KEYS) <= set(payload)
    assert payload["s"] == report.trend.s
    assert payload["h"] is report.trend.h
    assert payload["z"] == float(f"{report.trend.z:.6g}")
    assert payload["metadata"]["parameters"]["aggregation"] == "daily-mean"
    assert payload["metadata"]["input_sha256"] == hash_inputs([b"fixture"])


def test_json_without_normality(report):
    payload = json.loads(render_trend_report(report.model_copy(update={"normality": None}), "json"))
    assert payload["sw_w"] is None and payload["sw_p"] is None


def test_text_lists_table_rows(report):
    text = render_trend_report(report, "text").decode("utf-8")
    labels = [line.split()[0] for line in text.splitlines() if line.strip()]
    for label in ("h", "p", "z", "τ"):
        assert label in labels


def test_csv_is_parameter_value(report):
    rows = list(csv.reader(io.StringIO(render_trend_report(report, "csv").decode("utf-8"))))
    assert rows[0] == ["parameter", "value"]
    assert {row[0] for row in rows[1:]} >= set(REPORT_KEYS)


def test_unknown_format(report):
    with pytest.raises(InputValidationError):
        render_trend_report(report, "xml")


class TestPlotData:
    def test_qq_columns(self):
        text = emit_plot_data(PlotKind.QQ, qq_points([2.0, 1.0, 3.0])).decode("utf-8")
        assert text.splitlines()[0] == "theoretical,sample"
        assert len(text.splitlines()) == 4

    def test_seasonal_columns_and_order(self):
        data = {
            SeasonLabel(season=Season.MONSOON, season_year=2019): 31.0,
            SeasonLabel(season=Season.WINTER, season_year=2019): 14.5,
        }
        lines = emit_plot_data("seasonal", data).decode("utf-8").splitlines()
        assert lines == ["season_year,season,mean_c", "2019,Winter,14.5", "2019,Monsoon,31"]

    def test_annual_change_columns(self):
        lines = emit_plot_data("annual-change", [(2020, 0.5, 1.0), (2019, -0.5, -1.0)]).decode("utf-8").splitlines()
        assert lines == ["year,change_c,anomaly", "2019,-0.5,-1", "2020,0.5,1"]

    def test_seasonal_change_columns(self):
        data = {
            SeasonLabel(season=Season.SUMMER, season_year=2020): 0.25,
            SeasonLabel(season=Season.SUMMER, season_year=2019): -0.25,
        }
        lines = emit_plot_data(PlotKind.SEASONAL_CHANGE, data).decode("utf-8").splitlines()
        assert lines == ["season_year,season,change_c", "2019,Summer,-0.25", "2020,Summer,0.25"]

    @pytest.mark.parametrize("kind, empty", [("qq", QQData()), ("seasonal", {}), ("annual-change", [])])
    def test_empty_data_is_header_only(self, kind, empty):
        assert len(emit_plot_data(kind, empty).decode("utf-8").splitlines()) == 1

    def test_kind_mismatch(self):
        with pytest.raises(InputValidationError):
            emit_plot_data("qq", {})
        with pytest.raises(InputValidationError):
            emit_plot_data("seasonal", [(2019, 1.0, 1.0)])
        with pytest.raises(InputValidationError):
            emit_plot_data("histogram", [])


def test_region_ranking_csv():
    text = render_region_ranking([RegionChange(region="Lakshadweep", change=0.87), RegionChange(region="Tripura", change=0.07)])
    assert text.decode("utf-8").splitlines() == ["rank,region,change_c", "1,Lakshadweep,0.87", "2,Tripura,0.07"]


def test_normality_report():
    values = [1.0, 2.0, 2.5, 3.0, 3.2, 4.1, 5.0]
    payload = json.loads(render_normality_report(shapiro_wilk(values), qq_points(values), 0.05))
    assert set(payload) == {"n", "sw_w", "sw_p", "alpha", "normal_at_alpha", "qq_correlation"}
    assert payload["n"] == 7
    assert "metadata" not in payload


def test_normality_report_metadata():
    values = [1.0, 2.0, 2.5, 3.0, 3.2, 4.1, 5.0]
    metadata = report_metadata(hash_inputs([b"a,b\n"]), {"aggregation": "daily-mean", "confidence": 0.9})
    payload = json.loads(render_normality_report(shapiro_wilk(values), qq_points(values), 0.05, metadata=metadata))
    assert payload["metadata"]["input_sha256"] == hash_inputs([b"a,b\n"])
    assert payload["metadata"]["parameters"] == {"aggregation": "daily-mean", "confidence": 0.9}


def test_annual_summary_csv():
    summaries = [
        AnnualSummary(year=2020, t_max=44.5, t_min=3.25, std_dev=7.5, count=70),
        AnnualSummary(year=2019, t_max=47.94, t_min=0.3, std_dev=8.02, count=365),
    ]
    lines = render_annual_summary(summaries, covered_years=[2019]).decode("utf-8").splitlines()
    assert lines == [
        "year,t_max,t_min,std_dev,count,covered",
        "2019,47.94,0.3,8.02,365,True",
        "2020,44.5,3.25,7.5,70,False",
    ]


def test_cleaning_report_json():
    report = CleaningReport(rows_read=5, records_out=3, duplicates_removed=1, rows_rejected=1, duplicate_lines=[4])
    payload = json.loads(render_cleaning_report(report))
    assert payload["records_out"] == 3
    assert payload["duplicate_lines"] == [4]
    assert render_cleaning_report(report) == render_cleaning_report(report)
