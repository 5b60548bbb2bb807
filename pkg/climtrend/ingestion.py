"""
Parsing and cleaning of the two dataset shapes: region x year wide tables
(CCKP exports) and time-stamped station records (NREL exports).
"""
import io
import re
from collections import Counter
from datetime import datetime
from typing import Dict, List, Optional, Sequence, Set, Tuple, Union

import numpy as np
import pandas as pd

from climtrend.config import RegionColumns, StationColumns, settings
from climtrend.exceptions import FormatError, SampleSizeError
from climtrend.logger import logger
from climtrend.models import DefectKind
from climtrend.schemas import CleaningReport, Defect, Observation, RegionWideTable, StationRecordSet

RawInput = Union[bytes, str]

_LINE = "__line"
_YEAR = re.compile(r"-?\d+")
_PARSER_LINE = re.compile(r"line (\d+)")


def _decode(data: RawInput) -> str:
    if isinstance(data, str):
        return data
    try:
        return data.decode("utf-8-sig")
    except UnicodeDecodeError as e:
        raise FormatError(f"input is not valid UTF-8: {e.reason} at byte {e.start}") from e


def _read_frame(data: RawInput, skip_rows: int = 0) -> pd.DataFrame:
    """
    Read every cell as text, tagging each data row with its 1-based file line.
    """
    text = _decode(data)
    header_line = skip_rows + 1
    if not text.strip():
        raise FormatError("input is empty", line=header_line)

    try:
        df = pd.read_csv(
            io.StringIO(text),
            dtype=str,
            keep_default_na=False,
            skiprows=skip_rows,
            skip_blank_lines=False,
            skipinitialspace=True,
        )
    except pd.errors.EmptyDataError as e:
        raise FormatError("missing header row", line=header_line) from e
    except pd.errors.ParserError as e:
        match = _PARSER_LINE.search(str(e))
        raise FormatError(f"malformed CSV row: {e}", line=int(match.group(1)) if match else None) from e

    # Short rows leave trailing cells empty
    df = df.fillna("")
    df.columns = [str(column).strip() for column in df.columns]
    df[_LINE] = np.arange(len(df)) + header_line + 1

    # Fully blank lines carry no data
    cells = df.drop(columns=[_LINE])
    blank = (cells.apply(lambda column: column.str.strip()) == "").all(axis=1)
    return df[~blank].reset_index(drop=True)


def _find_column(columns: Sequence[str], name: str, line: int) -> str:
    for column in columns:
        if column.lower() == name.lower():
            return column
    raise FormatError(f"missing required column {name!r}", line=line)


def _null_tokens() -> Set[str]:
    return {token.strip() for token in settings.NULL_TOKENS}


def _in_bounds(value: float) -> bool:
    return settings.TEMPERATURE_MIN_C <= value <= settings.TEMPERATURE_MAX_C


# Region-wide tables
def parse_region_wide_csv(
    data: RawInput,
    columns: Optional[RegionColumns] = None,
    source: Optional[str] = None,
) -> RegionWideTable:
    """
    Parse a region x year table: a region-name column followed by year columns.

    Null tokens become missing cells; out-of-bounds cells become missing and
    are reported; non-numeric cells and duplicate regions are format errors.
    """
    columns = columns or RegionColumns.from_settings()
    df = _read_frame(data)
    header = [column for column in df.columns if column != _LINE]

    region_column = _find_column(header, columns.region, line=1)
    ignored = {name.lower() for name in columns.ignore}
    year_columns = [c for c in header if c != region_column and c.lower() not in ignored]
    if not year_columns:
        raise FormatError("header has no year columns", line=1)

    years = []
    for column in year_columns:
        if not _YEAR.fullmatch(column):
            raise FormatError("year column header is not an integer", line=1, column=column)
        years.append(int(column))
    if any(b <= a for a, b in zip(years, years[1:])):
        raise FormatError("year columns must be strictly increasing", line=1)

    nulls = _null_tokens()
    regions: List[str] = []
    cells: List[List[Optional[float]]] = []
    defects: List[Defect] = []

    for record in df.to_dict(orient="records"):
        line = int(record[_LINE])
        region = record[region_column].strip()
        if not region:
            raise FormatError("empty region name", line=line, column=region_column)
        if region in regions:
            raise FormatError(f"duplicate region {region!r}", line=line, column=region_column)

        values: List[Optional[float]] = []
        for column in year_columns:
            token = record[column].strip()
            if token in nulls:
                values.append(None)
                defects.append(Defect(kind=DefectKind.NULL, line=line, source=source, column=column))
                continue
            try:
                value = float(token)
            except ValueError:
                raise FormatError(f"non-numeric cell {token!r}", line=line, column=column)
            if not np.isfinite(value):
                raise FormatError(f"non-finite cell {token!r}", line=line, column=column)
            if not _in_bounds(value):
                values.append(None)
                defects.append(
                    Defect(kind=DefectKind.REJECTED, line=line, source=source, column=column,
                           detail=f"{value} outside sanity bounds")
                )
                continue
            values.append(value)

        regions.append(region)
        cells.append(values)

    logger.debug("Parsed region-wide table", regions=len(regions), years=len(years), defects=len(defects))
    return RegionWideTable(regions=regions, years=years, cells=cells, rows_read=len(df), defects=defects)


def serialize_region_wide_csv(table: RegionWideTable, columns: Optional[RegionColumns] = None) -> bytes:
    """Canonical CSV form of a region table; missing cells written as NA."""
    columns = columns or RegionColumns.from_settings()
    frame = pd.DataFrame(
        [[region] + ["NA" if v is None else repr(v) for v in row] for region, row in zip(table.regions, table.cells)],
        columns=[columns.region] + [str(year) for year in table.years],
    )
    return frame.to_csv(index=False, lineterminator="\n").encode("utf-8")


# Station records
def _station_timestamps(df: pd.DataFrame, columns: StationColumns, header_line: int):
    """Parsed timestamps plus the time-zone label they carry."""
    header = list(df.columns)
    if columns.timestamp:
        column = _find_column(header, columns.timestamp, line=header_line)
        raw = df[column].str.strip()
        try:
            stamps = pd.to_datetime(raw, errors="coerce", format="ISO8601")
        except ValueError:
            stamps = None
        if stamps is None or not pd.api.types.is_datetime64_any_dtype(stamps):
            # Mixed UTC offsets
            stamps = pd.to_datetime(raw, errors="coerce", format="ISO8601", utc=True)
        if getattr(stamps.dt, "tz", None) is not None:
            return stamps.dt.tz_convert("UTC").dt.tz_localize(None), "UTC"
        return stamps, None

    parts = {}
    for part in ("year", "month", "day", "hour", "minute"):
        name = getattr(columns, part)
        if name is None:
            continue
        if part == "minute" and name.lower() not in {c.lower() for c in header}:
            # Hourly exports may omit minutes
            continue
        column = _find_column(header, name, line=header_line)
        parts[part] = pd.to_numeric(df[column].str.strip(), errors="coerce")
    return pd.to_datetime(pd.DataFrame(parts), errors="coerce"), None


def parse_station_csv(
    data: RawInput,
    columns: Optional[StationColumns] = None,
    station_id: str = "station",
    timezone: Optional[str] = None,
    source: Optional[str] = None,
) -> StationRecordSet:
    """
    Parse time-stamped station records into a sorted, de-duplicated record set.

    Rows with null, non-numeric or out-of-bounds temperatures are rejected into
    the defect log. Exact (timestamp, value) duplicates keep their first
    occurrence; differing values at one timestamp are kept and flagged.
    """
    columns = columns or StationColumns.from_settings()
    header_line = columns.skip_rows + 1
    df = _read_frame(data, skip_rows=columns.skip_rows)
    if df.empty:
        raise SampleSizeError(f"no data rows after the header (line {header_line})")

    stamps, zone = _station_timestamps(df, columns, header_line)
    lines = df[_LINE].to_numpy()
    bad = stamps.isna().to_numpy()
    if bad.any():
        raise FormatError("unparseable timestamp", line=int(lines[bad.argmax()]))

    temperature_column = _find_column(list(df.columns), columns.temperature, line=header_line)
    raw = df[temperature_column].str.strip()
    is_null = raw.isin(_null_tokens()).to_numpy()
    values = pd.to_numeric(raw.where(~is_null), errors="coerce").to_numpy(dtype=np.float64)
    non_numeric = ~is_null & ~np.isfinite(values)
    out_of_bounds = ~is_null & ~non_numeric & ~((values >= settings.TEMPERATURE_MIN_C) & (values <= settings.TEMPERATURE_MAX_C))

    defects: List[Defect] = []
    for line in lines[is_null]:
        defects.append(Defect(kind=DefectKind.NULL, line=int(line), source=source, column=temperature_column))
    for line, token in zip(lines[non_numeric], raw.to_numpy()[non_numeric]):
        defects.append(Defect(kind=DefectKind.REJECTED, line=int(line), source=source,
                              column=temperature_column, detail=f"non-numeric temperature {token!r}"))
    for line, value in zip(lines[out_of_bounds], values[out_of_bounds]):
        defects.append(Defect(kind=DefectKind.REJECTED, line=int(line), source=source,
                              column=temperature_column, detail=f"{value} outside sanity bounds"))

    keep = ~(is_null | non_numeric | out_of_bounds)
    frame = pd.DataFrame({"timestamp": stamps.to_numpy()[keep], "value": values[keep], "line": lines[keep]})
    frame, extra = _deduplicate(frame, source)
    defects.extend(extra)
    defects.sort(key=lambda d: (d.line, d.kind.value))

    records = [
        Observation(timestamp=ts.to_pydatetime(), value=float(v))
        for ts, v in zip(pd.to_datetime(frame["timestamp"]), frame["value"])
    ]
    logger.debug("Parsed station records", rows=len(df), records=len(records), defects=len(defects))
    return StationRecordSet(
        station_id=station_id,
        timezone=timezone or zone or settings.STATION_TIMEZONE,
        records=records,
        rows_read=len(df),
        defects=defects,
    )


def _deduplicate(frame: pd.DataFrame, source: Optional[str]):
    """Drop exact duplicates, flag conflicting values, and sort by time."""
    defects: List[Defect] = []
    duplicate = frame.duplicated(subset=["timestamp", "value"], keep="first")
    for line in frame.loc[duplicate, "line"]:
        defects.append(Defect(kind=DefectKind.DUPLICATE, line=int(line), source=source))
    frame = frame[~duplicate]

    conflict = frame.duplicated(subset=["timestamp"], keep=False)
    for line in frame.loc[conflict, "line"]:
        defects.append(Defect(kind=DefectKind.CONFLICT, line=int(line), source=source,
                              detail="different values at one timestamp"))

    frame = frame.sort_values("timestamp", kind="mergesort").reset_index(drop=True)
    return frame, defects


def _cross_file_conflicts(kept: List[Tuple[int, Observation]], record_sets: Sequence[StationRecordSet]) -> List[Defect]:
    """CONFLICT defects for timestamps whose differing values come from different sets."""
    per_set = [Counter(record.timestamp for record in record_set.records) for record_set in record_sets]
    groups: Dict[datetime, List[Tuple[int, Observation]]] = {}
    for origin, record in kept:
        groups.setdefault(record.timestamp, []).append((origin, record))

    defects: List[Defect] = []
    for timestamp, group in groups.items():
        if len({origin for origin, _ in group}) < 2 or len({record.value for _, record in group}) < 2:
            continue
        for origin, record in group:
            # Conflicts inside one file were flagged when it was parsed
            if per_set[origin][timestamp] > 1:
                continue
            defects.append(Defect(kind=DefectKind.CONFLICT, line=0, source=record_sets[origin].station_id,
                                  detail=f"{record.value} at {timestamp.isoformat()} differs from another file"))
    return defects


def merge_station_records(record_sets: Sequence[StationRecordSet]) -> StationRecordSet:
    """
    Combine record sets (one file per year, typically); duplicates across sets
    are removed and logged against the later set. Differing values at one
    timestamp are kept and flagged as conflicts.
    """
    if not record_sets:
        raise SampleSizeError("nothing to merge")
    if len(record_sets) == 1:
        return record_sets[0]

    seen = {}
    kept: List[Tuple[int, Observation]] = []
    defects: List[Defect] = []
    for origin, record_set in enumerate(record_sets):
        defects.extend(record_set.defects)
        for position, record in enumerate(record_set.records):
            key = (record.timestamp, record.value)
            if key in seen:
                defects.append(Defect(kind=DefectKind.DUPLICATE, line=0, source=record_set.station_id,
                                      detail=f"record {position + 1} repeats an earlier file"))
                continue
            seen[key] = True
            kept.append((origin, record))

    conflicts = _cross_file_conflicts(kept, record_sets)
    if conflicts:
        logger.warning("Conflicting values across files", records=len(conflicts))
    defects.extend(conflicts)

    records = sorted((record for _, record in kept), key=lambda r: r.timestamp)
    first = record_sets[0]
    return StationRecordSet(
        station_id=first.station_id,
        timezone=first.timezone,
        records=records,
        rows_read=sum(s.rows_read for s in record_sets),
        defects=defects,
    )


def serialize_station_csv(record_set: StationRecordSet) -> bytes:
    """Canonical CSV (ISO timestamp, temperature) of a record set."""
    frame = pd.DataFrame(
        {
            "timestamp": [r.timestamp.isoformat() for r in record_set.records],
            "temperature": [repr(r.value) for r in record_set.records],
        }
    )
    return frame.to_csv(index=False, lineterminator="\n").encode("utf-8")


CANONICAL_STATION_COLUMNS = StationColumns(timestamp="timestamp", hour=None, minute=None, temperature="temperature")


def cleaning_report(parsed: Union[StationRecordSet, RegionWideTable]) -> CleaningReport:
    """
    Summarize what cleaning did between the raw rows and the parsed output.

    For station records, records_out = rows_read - duplicates_removed - rows_rejected.
    For region tables, null and rejected counts are per cell.
    """
    by_kind = {kind: sorted({d.line for d in parsed.defects if d.kind == kind}) for kind in DefectKind}
    counts = {kind: sum(1 for d in parsed.defects if d.kind == kind) for kind in DefectKind}

    if isinstance(parsed, RegionWideTable):
        return CleaningReport(
            rows_read=parsed.rows_read,
            records_out=len(parsed.regions),
            nulls_encountered=counts[DefectKind.NULL],
            cells_rejected=counts[DefectKind.REJECTED],
            null_lines=by_kind[DefectKind.NULL],
            rejected_lines=by_kind[DefectKind.REJECTED],
        )

    return CleaningReport(
        rows_read=parsed.rows_read,
        records_out=len(parsed.records),
        duplicates_removed=counts[DefectKind.DUPLICATE],
        nulls_encountered=counts[DefectKind.NULL],
        rows_rejected=counts[DefectKind.NULL] + counts[DefectKind.REJECTED],
        conflicts_flagged=counts[DefectKind.CONFLICT],
        duplicate_lines=by_kind[DefectKind.DUPLICATE],
        null_lines=by_kind[DefectKind.NULL],
        rejected_lines=sorted(set(by_kind[DefectKind.NULL]) | set(by_kind[DefectKind.REJECTED])),
        conflict_lines=by_kind[DefectKind.CONFLICT],
    )
