from datetime import date, datetime, timedelta

import numpy as np
import pytest

from climtrend.exceptions import CoverageError, InputValidationError, SampleSizeError
from climtrend.models import DecadalMethod, Season
from climtrend.schemas import AnnualSummary, Observation, RegionChange, SeasonLabel
from climtrend.timeseries import (
    aggregate_annual,
    aggregate_seasonal,
    annual_change,
    annual_means,
    classify_season,
    daily_means,
    decadal_change,
    filter_covered_years,
    mean_change,
    rank_regions,
    seasonal_change,
)


def obs(year, month, day, value, hour=0):
    return Observation(timestamp=datetime(year, month, day, hour), value=value)


class TestSeasons:
    @pytest.mark.parametrize(
        "when, season, year",
        [
            (date(2018, 4, 15), Season.SUMMER, 2018),
            (date(2018, 1, 10), Season.WINTER, 2018),
            (date(2018, 12, 25), Season.WINTER, 2019),
            (date(2018, 8, 1), Season.MONSOON, 2018),
            (date(2018, 11, 30), Season.POST_MONSOON, 2018),
        ],
    )
    def test_examples(self, when, season, year):
        assert classify_season(when) == SeasonLabel(season=season, season_year=year)

    def test_every_month_has_one_season(self):
        seasons = {classify_season(date(2020, month, 1)).season for month in range(1, 13)}
        assert seasons == set(Season)

    def test_march_widens_summer(self):
        summer = [month for month in range(1, 13) if classify_season(date(2020, month, 1)).season == Season.SUMMER]
        assert summer == [3, 4, 5, 6]


class TestAnnual:
    def test_single_observation(self):
        assert aggregate_annual([obs(2020, 6, 1, 25.0)]) == [
            AnnualSummary(year=2020, t_max=25.0, t_min=25.0, std_dev=0.0, count=1)
        ]

    def test_known_values(self):
        observations = [obs(2019, 1, 1, v) for v in (10.0, 12.0, 14.0)] + [obs(2020, 5, 2, 30.0), obs(2020, 5, 3, 32.0)]
        first, second = aggregate_annual(observations)
        assert (first.year, first.t_max, first.t_min, first.count) == (2019, 14.0, 10.0, 3)
        assert first.std_dev == pytest.approx(2.0)
        assert second.std_dev == pytest.approx(np.std([30.0, 32.0], ddof=1))

    def test_counts_and_extremes(self, rng):
        start = datetime(2016, 1, 1)
        values = rng.normal(25, 8, size=1500).clip(-10, 50)
        observations = [Observation(timestamp=start + timedelta(hours=12 * i), value=float(v)) for i, v in enumerate(values)]
        summaries = aggregate_annual(observations)
        assert sum(s.count for s in summaries) == len(observations)
        assert max(s.t_max for s in summaries) == float(values.max())
        assert [s.year for s in summaries] == sorted(s.year for s in summaries)

    def test_constant_year_has_zero_spread(self):
        summary = aggregate_annual([obs(2021, 3, d, 18.3) for d in range(1, 6)])[0]
        assert summary.std_dev == 0.0

    def test_empty(self):
        with pytest.raises(SampleSizeError):
            aggregate_annual([])

    def test_coverage_filter(self):
        summaries = [
            AnnualSummary(year=2019, t_max=1, t_min=0, std_dev=0.5, count=365),
            AnnualSummary(year=2020, t_max=1, t_min=0, std_dev=0.5, count=120),
        ]
        assert [s.year for s in filter_covered_years(summaries, 300)] == [2019]

    def test_daily_and_annual_means(self):
        observations = [obs(2019, 7, 1, 30.0, hour=h) for h in range(4)] + [obs(2019, 7, 2, 20.0)]
        means = daily_means(observations)
        assert [m.value for m in means] == [30.0, 20.0]
        assert annual_means(observations) == [(2019, 28.0)]


class TestSeasonal:
    def test_single_group(self):
        result = aggregate_seasonal([obs(2020, 4, d, v) for d, v in ((1, 30.0), (2, 32.0), (3, 34.0))])
        assert result == {SeasonLabel(season=Season.SUMMER, season_year=2020): 32.0}

    def test_winter_spans_year_boundary(self):
        observations = [obs(2018, 12, 15, 12.0), obs(2019, 1, 15, 10.0), obs(2019, 2, 15, 14.0)]
        assert aggregate_seasonal(observations) == {SeasonLabel(season=Season.WINTER, season_year=2019): 12.0}

    def test_constant_series(self):
        observations = [obs(2019, month, 1, 21.5) for month in range(1, 13)]
        assert set(aggregate_seasonal(observations).values()) == {21.5}

    def test_order(self):
        result = aggregate_seasonal([obs(2019, 8, 1, 1.0), obs(2019, 1, 1, 2.0), obs(2018, 10, 1, 3.0)])
        assert [(k.season_year, k.season) for k in result] == [
            (2018, Season.POST_MONSOON), (2019, Season.WINTER), (2019, Season.MONSOON)
        ]

    def test_change_against_climatology(self):
        seasonal = {
            SeasonLabel(season=Season.SUMMER, season_year=2019): 30.0,
            SeasonLabel(season=Season.SUMMER, season_year=2020): 32.0,
            SeasonLabel(season=Season.WINTER, season_year=2020): 12.0,
        }
        change = seasonal_change(seasonal)
        assert list(change.values()) == [-1.0, 0.0, 1.0]


class TestDecadalChange:
    years = list(range(2001, 2021))

    def test_constant(self):
        assert decadal_change([(y, 24.0) for y in self.years], 2020) == 0.0

    def test_linear(self):
        annual = [(y, 20.0 + 0.05 * (y - 2001)) for y in self.years]
        assert decadal_change(annual, 2020) == pytest.approx(0.5, abs=1e-12)

    def test_methods_agree_on_a_line(self):
        annual = [(y, 0.05 * y) for y in self.years]
        for method in DecadalMethod:
            assert decadal_change(annual, 2020, method) == pytest.approx(0.5 if method != DecadalMethod.ENDPOINT else 0.95)

    def test_shift_and_swap(self, rng):
        values = rng.normal(25, 1, size=20)
        annual = list(zip(self.years, values))
        shifted = [(y, v + 3.0) for y, v in annual]
        swapped = list(zip(self.years, np.concatenate([values[10:], values[:10]])))
        base = decadal_change(annual, 2020)
        assert decadal_change(shifted, 2020) == pytest.approx(base, abs=1e-12)
        assert decadal_change(swapped, 2020) == pytest.approx(-base, abs=1e-12)

    def test_missing_years(self):
        annual = [(y, 24.0) for y in self.years if y not in (2005, 2017)]
        with pytest.raises(CoverageError) as excinfo:
            decadal_change(annual, 2020)
        assert excinfo.value.missing == [2005, 2017]

    def test_duplicate_year(self):
        with pytest.raises(InputValidationError):
            decadal_change([(2020, 1.0), (2020, 2.0)], 2020)

    def test_annual_change(self):
        rows = annual_change([(2018, 20.0), (2019, 21.0), (2020, 22.0)])
        assert [(y, c) for y, c, _ in rows] == [(2018, -1.0), (2019, 0.0), (2020, 1.0)]
        assert [a for _, _, a in rows] == pytest.approx([-1.0, 0.0, 1.0])

    def test_annual_change_baseline(self):
        rows = annual_change([(2018, 20.0), (2019, 21.0), (2020, 22.0)], baseline=(2018, 2018))
        assert [c for _, c, _ in rows] == [0.0, 1.0, 2.0]


class TestRanking:
    def test_descending(self):
        ranked = rank_regions([RegionChange(region="A", change=0.1), RegionChange(region="B", change=0.9)])
        assert [r.region for r in ranked] == ["B", "A"]

    def test_ties_alphabetical(self):
        ranked = rank_regions([RegionChange(region=r, change=0.4) for r in ("Goa", "Assam", "Delhi")])
        assert [r.region for r in ranked] == ["Assam", "Delhi", "Goa"]

    def test_permutation(self, rng):
        changes = [RegionChange(region=f"R{i}", change=float(c)) for i, c in enumerate(rng.normal(size=30))]
        assert sorted(rank_regions(changes), key=lambda c: c.region) == sorted(changes, key=lambda c: c.region)

    def test_duplicate(self):
        with pytest.raises(InputValidationError):
            rank_regions([RegionChange(region="A", change=0.1), RegionChange(region="A", change=0.2)])

    def test_mean_change(self):
        assert mean_change([RegionChange(region="A", change=0.2), RegionChange(region="B", change=0.4)]) == pytest.approx(0.3)
