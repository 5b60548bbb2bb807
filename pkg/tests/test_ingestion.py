from datetime import datetime

import pytest

from conftest import daily_rows, station_csv
from climtrend.config import RegionColumns, StationColumns
from climtrend.exceptions import FormatError, SampleSizeError
from climtrend.ingestion import (
    CANONICAL_STATION_COLUMNS,
    cleaning_report,
    merge_station_records,
    parse_region_wide_csv,
    parse_station_csv,
    serialize_region_wide_csv,
    serialize_station_csv,
)
from climtrend.models import DefectKind


class TestRegionWide:
    def test_minimal(self):
        table = parse_region_wide_csv(b"state,2019,2020\nDelhi,25.1,25.4\n")
        assert table.regions == ["Delhi"]
        assert table.years == [2019, 2020]
        assert table.cells == [[25.1, 25.4]]

    def test_period_column_ignored_and_names_trimmed(self):
        table = parse_region_wide_csv("state,period,2019\n  Goa ,annual,27.0\n")
        assert table.regions == ["Goa"]
        assert table.years == [2019]

    def test_null_cell_is_missing(self):
        table = parse_region_wide_csv("state,2019,2020\nDelhi,NA,25.4\n")
        assert table.cells == [[None, 25.4]]
        assert table.series("Delhi") == [(2020, 25.4)]
        report = cleaning_report(table)
        assert report.nulls_encountered == 1
        assert report.null_lines == [2]

    def test_out_of_bounds_cell_rejected(self):
        table = parse_region_wide_csv("state,2019,2020\nDelhi,999,25.4\n")
        assert table.cells == [[None, 25.4]]
        assert cleaning_report(table).cells_rejected == 1

    def test_duplicate_region(self):
        with pytest.raises(FormatError) as excinfo:
            parse_region_wide_csv("state,2019\nDelhi,25.0\nDelhi,26.0\n")
        assert excinfo.value.line == 3

    def test_non_numeric_cell(self):
        with pytest.raises(FormatError) as excinfo:
            parse_region_wide_csv("state,2019,2020\nDelhi,25.0,warm\n")
        assert (excinfo.value.line, excinfo.value.column) == (2, "2020")

    def test_malformed_header(self):
        with pytest.raises(FormatError) as excinfo:
            parse_region_wide_csv("state,2019,latest\nDelhi,25.0,26.0\n")
        assert excinfo.value.line == 1

    def test_missing_region_column(self):
        with pytest.raises(FormatError):
            parse_region_wide_csv("name,2019\nDelhi,25.0\n")

    def test_custom_region_column(self):
        table = parse_region_wide_csv("zone,2019\nNorth,25.0\n", columns=RegionColumns(region="zone", ignore=[]))
        assert table.regions == ["North"]

    def test_reparse_is_identical(self):
        table = parse_region_wide_csv("state,period,2019,2020\nDelhi,annual,25.1,NA\nGoa,annual,27.3,27.4\n")
        again = parse_region_wide_csv(serialize_region_wide_csv(table))
        assert (again.regions, again.years, again.cells) == (table.regions, table.years, table.cells)


class TestStation:
    def test_identical_rows_deduplicated(self):
        text = station_csv([(datetime(2019, 1, 1, 5), 12.5), (datetime(2019, 1, 1, 5), 12.5)])
        records = parse_station_csv(text)
        assert len(records.records) == 1
        report = cleaning_report(records)
        assert report.duplicates_removed == 1
        assert report.duplicate_lines == [3]

    def test_out_of_bounds_rejected(self):
        text = station_csv([(datetime(2019, 1, 1, 0), 999), (datetime(2019, 1, 1, 1), 14.0)])
        records = parse_station_csv(text)
        assert [r.value for r in records.records] == [14.0]
        report = cleaning_report(records)
        assert report.rows_rejected == 1
        assert report.rejected_lines == [2]

    def test_sorted_output(self):
        text = station_csv([(datetime(2019, 1, 3), 3.0), (datetime(2019, 1, 1), 1.0), (datetime(2019, 1, 2), 2.0)])
        assert [r.value for r in parse_station_csv(text).records] == [1.0, 2.0, 3.0]

    def test_conflicts_kept_and_flagged(self):
        text = station_csv([(datetime(2019, 1, 1), 1.0), (datetime(2019, 1, 1), 2.0)])
        records = parse_station_csv(text)
        assert len(records.records) == 2
        assert cleaning_report(records).conflict_lines == [2, 3]

    def test_unparseable_timestamp(self):
        text = "Year,Month,Day,Hour,Temperature\n2019,1,1,0,10.0\n2019,13,1,0,11.0\n"
        with pytest.raises(FormatError) as excinfo:
            parse_station_csv(text)
        assert excinfo.value.line == 3

    def test_iso_timestamps_and_preamble(self):
        text = "Source,NSRDB\nLatitude,28.6\ntimestamp,temperature\n2020-01-01T00:00,10.0\n2020-01-01T01:00,11.0\n"
        columns = StationColumns(timestamp="timestamp", temperature="temperature", skip_rows=2)
        records = parse_station_csv(text, columns=columns)
        assert [r.timestamp for r in records.records] == [datetime(2020, 1, 1, 0), datetime(2020, 1, 1, 1)]

    def test_utc_offsets_converted(self):
        text = "timestamp,temperature\n2020-01-01T05:30:00+05:30,10.0\n"
        records = parse_station_csv(text, columns=CANONICAL_STATION_COLUMNS)
        assert records.records[0].timestamp == datetime(2020, 1, 1, 0, 0)
        assert records.timezone == "UTC"

    def test_empty_body(self):
        with pytest.raises(SampleSizeError):
            parse_station_csv("Year,Month,Day,Hour,Temperature\n")

    def test_empty_file(self):
        with pytest.raises(FormatError):
            parse_station_csv(b"")

    def test_mixed_defects(self):
        rows = [
            (datetime(2019, 1, 1, 0), 10.0),
            (datetime(2019, 1, 1, 0), 10.0),
            (datetime(2019, 1, 1, 1), "NA"),
            (datetime(2019, 1, 1, 2), 75.0),
            (datetime(2019, 1, 1, 3), "n/a?"),
            (datetime(2019, 1, 1, 4), 12.0),
            (datetime(2019, 1, 1, 4), 12.0),
            (datetime(2019, 1, 1, 5), 13.0),
        ]
        records = parse_station_csv(station_csv(rows))
        report = cleaning_report(records)
        assert report.rows_read == 8
        assert report.duplicates_removed == 2
        assert report.nulls_encountered == 1
        assert report.rows_rejected == 3
        assert report.records_out == report.rows_read - report.duplicates_removed - report.rows_rejected == 3

    def test_clean_file(self):
        report = cleaning_report(parse_station_csv(station_csv(daily_rows(datetime(2019, 5, 1), [30.0, 31.0]))))
        assert (report.duplicates_removed, report.nulls_encountered, report.rows_rejected) == (0, 0, 0)

    def test_reparse_is_identical(self):
        text = station_csv(daily_rows(datetime(2019, 5, 1), [30.25, 31.5, 29.0]))
        records = parse_station_csv(text)
        again = parse_station_csv(serialize_station_csv(records), columns=CANONICAL_STATION_COLUMNS)
        assert again.records == records.records


def test_merge_removes_cross_file_duplicates():
    first = parse_station_csv(station_csv(daily_rows(datetime(2019, 12, 30), [10.0, 11.0])), station_id="DEL")
    second = parse_station_csv(station_csv(daily_rows(datetime(2019, 12, 31), [11.0, 12.0])), station_id="DEL")
    merged = merge_station_records([second, first])
    assert [r.value for r in merged.records] == [10.0, 11.0, 12.0]
    assert [d.kind for d in merged.defects] == [DefectKind.DUPLICATE]
    assert merged.rows_read == 4


def test_merge_flags_conflict_across_files():
    first = parse_station_csv(station_csv([(datetime(2019, 12, 31, 23), 10.0)]), station_id="DEL")
    second = parse_station_csv(station_csv([(datetime(2019, 12, 31, 23), 11.0)]), station_id="DEL")
    merged = merge_station_records([first, second])
    assert [r.value for r in merged.records] == [10.0, 11.0]
    report = cleaning_report(merged)
    assert report.conflicts_flagged == 2
    assert report.duplicates_removed == 0


def test_merge_does_not_reflag_in_file_conflicts():
    stamp = datetime(2019, 12, 31, 23)
    first = parse_station_csv(station_csv([(stamp, 10.0), (stamp, 12.0)]), station_id="DEL")
    second = parse_station_csv(station_csv([(stamp, 11.0)]), station_id="DEL")
    assert cleaning_report(first).conflicts_flagged == 2
    merged = merge_station_records([first, second])
    assert len(merged.records) == 3
    assert cleaning_report(merged).conflicts_flagged == 3
