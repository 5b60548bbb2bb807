from datetime import datetime, timedelta
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple

import numpy as np
import pytest

STATION_HEADER = "Year,Month,Day,Hour,Temperature"


def station_csv(rows: Iterable[Tuple[datetime, object]]) -> str:
    """Station CSV text in the default Year/Month/Day/Hour/Temperature layout."""
    lines = [STATION_HEADER]
    for stamp, value in rows:
        lines.append(f"{stamp.year},{stamp.month},{stamp.day},{stamp.hour},{value}")
    return "\n".join(lines) + "\n"


def daily_rows(start: datetime, values: Sequence[float]) -> List[Tuple[datetime, float]]:
    return [(start + timedelta(days=i), value) for i, value in enumerate(values)]


def region_csv(series: dict, years: Sequence[int]) -> str:
    lines = ["state,period," + ",".join(str(y) for y in years)]
    for region, values in series.items():
        lines.append(f"{region},annual," + ",".join(repr(float(v)) for v in values))
    return "\n".join(lines) + "\n"


def brute_force_s(values: Sequence[float]) -> int:
    s = 0
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            s += (values[j] > values[i]) - (values[j] < values[i])
    return s


def brute_force_slopes(values: Sequence[float], times: Sequence[float]) -> List[float]:
    slopes = []
    for j in range(len(values)):
        for k in range(j + 1, len(values)):
            slopes.append((values[k] - values[j]) / (times[k] - times[j]))
    return sorted(slopes)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def write_file(tmp_path: Path):
    def _write(name: str, text: str) -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path
    return _write


@pytest.fixture
def linear_station_file(write_file) -> Path:
    values = [20.0 + 0.5 * i for i in range(20)]
    return write_file("linear.csv", station_csv(daily_rows(datetime(2019, 1, 1), values)))


@pytest.fixture
def constant_station_file(write_file) -> Path:
    return write_file("constant.csv", station_csv(daily_rows(datetime(2019, 1, 1), [25.0] * 12)))


@pytest.fixture
def two_region_file(write_file) -> Path:
    years = list(range(2001, 2021))
    series = {
        "Alpha": [24.0 + 0.01 * (y - 2001) for y in years],
        "Beta": [26.0 + 0.05 * (y - 2001) for y in years],
    }
    return write_file("regions.csv", region_csv(series, years))
