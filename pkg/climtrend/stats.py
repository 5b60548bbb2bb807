"""
Nonparametric trend statistics: Mann-Kendall test, Kendall's tau, Theil-Sen
slope with Sen's confidence interval, and standardized anomalies.

All functions are pure; they accept a Sample or any sequence of floats
(time coordinates then default to the 1-based index).
"""
import math
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from climtrend.distributions import normal_quantile, two_sided_p_value
from climtrend.exceptions import AllTiedError, DegenerateError, InputValidationError, SampleSizeError
from climtrend.logger import logger
from climtrend.models import Trend
from climtrend.schemas import AnomalySeries, Sample, SenEstimate, TieSummary, TrendTestResult

SampleLike = Union[Sample, Sequence[float], np.ndarray]

MIN_TREND_N = 4


def as_sample(values: SampleLike, times: Optional[Sequence[float]] = None) -> Sample:
    """
    Build a validated Sample, translating schema errors into InputValidationError.
    """
    if isinstance(values, Sample):
        return values
    try:
        return Sample(
            values=np.asarray(values, dtype=np.float64).tolist(),
            times=None if times is None else np.asarray(times, dtype=np.float64).tolist(),
        )
    except ValueError as e:
        raise InputValidationError(f"invalid sample: {e}") from e


def _require(sample: Sample, minimum: int, operation: str):
    if sample.n < minimum:
        raise SampleSizeError(f"{operation} needs at least {minimum} observations, got {sample.n}")


def _pair_count(n: int) -> int:
    return n * (n - 1) // 2


# Mann-Kendall
def mk_s_statistic(sample: SampleLike) -> int:
    """
    S = sum over i < j of sgn(x_j - x_i).
    """
    sample = as_sample(sample)
    _require(sample, 2, "Mann-Kendall S")
    x = sample.x()
    s = 0
    # Row-wise keeps memory linear for long hourly series
    for i in range(sample.n - 1):
        s += int(np.sign(x[i + 1:] - x[i]).sum())
    return s


def tie_summary(sample: SampleLike) -> TieSummary:
    """Tied groups (exact equality) with their multiplicities."""
    sample = as_sample(sample)
    _require(sample, 1, "tie summary")
    values, counts = np.unique(sample.x(), return_counts=True)
    groups = [(float(v), int(c)) for v, c in zip(values, counts) if c >= 2]
    return TieSummary(groups=groups, m=len(groups))


def mk_variance(n: int, ties: Optional[TieSummary] = None) -> float:
    """
    Var(S) = [n(n-1)(2n+5) - sum_k t_k(t_k-1)(2t_k+5)] / 18
    """
    if n < 2:
        raise SampleSizeError(f"Var(S) needs n >= 2, got {n}")
    ties = ties or TieSummary()
    if ties.tied_count > n:
        raise InputValidationError(f"tied groups cover {ties.tied_count} values but n={n}")

    tie_term = sum(t * (t - 1) * (2 * t + 5) for _, t in ties.groups)
    numerator = n * (n - 1) * (2 * n + 5) - tie_term
    if numerator < 0:
        raise InputValidationError("tie summary is inconsistent with n (negative variance)")
    return numerator / 18


def mk_z_statistic(s: int, var_s: float) -> float:
    """Continuity-corrected standard normal score of S."""
    if s == 0:
        return 0.0
    if var_s <= 0.0:
        raise DegenerateError(f"Var(S) is {var_s} while S={s}")
    if s > 0:
        return (s - 1) / math.sqrt(var_s)
    return (s + 1) / math.sqrt(var_s)


def kendall_tau(sample: SampleLike) -> Tuple[float, float]:
    """
    Kendall's tau-a and tie-corrected tau-b of the values against time.

    Time is assumed untied, so only value ties shrink the tau-b denominator.
    Raises AllTiedError (carrying tau_a = 0) when every value is tied.
    """
    sample = as_sample(sample)
    _require(sample, 2, "Kendall tau")
    s = mk_s_statistic(sample)
    return _taus(s, sample.n, tie_summary(sample))


def _taus(s: int, n: int, ties: TieSummary) -> Tuple[float, float]:
    n0 = _pair_count(n)
    n1 = sum(t * (t - 1) // 2 for _, t in ties.groups)
    tau_a = s / n0
    if n0 - n1 == 0:
        raise AllTiedError("tau-b is undefined when every value is tied", tau_a=tau_a)
    tau_b = tau_a if n1 == 0 else s / math.sqrt((n0 - n1) * n0)
    return tau_a, tau_b


def mann_kendall(sample: SampleLike, alpha: float = 0.05) -> TrendTestResult:
    """
    Two-sided Mann-Kendall trend test with tie-corrected variance.
    """
    sample = as_sample(sample)
    _require(sample, MIN_TREND_N, "Mann-Kendall test")
    if not 0.0 < alpha < 1.0:
        raise InputValidationError(f"alpha must lie in (0, 1), got {alpha}")

    n = sample.n
    s = mk_s_statistic(sample)
    ties = tie_summary(sample)
    var_s = mk_variance(n, ties)

    if var_s == 0.0:
        # Constant series: no trend, not an error
        logger.debug("Mann-Kendall on a constant series", n=n)
        return TrendTestResult(
            n=n, s=0, var_s=0.0, z=0.0, p_two_sided=1.0, tau_a=0.0, tau_b=0.0,
            h=False, alpha=alpha, trend=Trend.NO_TREND,
        )

    z = mk_z_statistic(s, var_s)
    p = two_sided_p_value(z)
    tau_a, tau_b = _taus(s, n, ties)
    h = p < alpha

    if not h:
        trend = Trend.NO_TREND
    elif z > 0:
        trend = Trend.INCREASING
    else:
        trend = Trend.DECREASING

    logger.debug("Mann-Kendall computed", n=n, s=s, var_s=var_s, z=z, p=p, tied_groups=ties.m)
    return TrendTestResult(
        n=n, s=s, var_s=var_s, z=z, p_two_sided=p, tau_a=tau_a, tau_b=tau_b,
        h=h, alpha=alpha, trend=trend,
    )


# Theil-Sen
def _slope_set(sample: Sample) -> np.ndarray:
    """Unordered pairwise slopes, filled row by row into one preallocated array."""
    x, t = sample.x(), sample.t()
    n = sample.n
    slopes = np.empty(_pair_count(n), dtype=np.float64)
    start = 0
    for i in range(n - 1):
        stop = start + n - 1 - i
        np.divide(x[i + 1:] - x[i], t[i + 1:] - t[i], out=slopes[start:stop])
        start = stop
    return slopes


def pairwise_slopes(sample: SampleLike) -> np.ndarray:
    """
    All N = n(n-1)/2 slopes (x_k - x_j) / (t_k - t_j), j < k, sorted ascending.
    """
    sample = as_sample(sample)
    _require(sample, 2, "pairwise slopes")
    slopes = _slope_set(sample)
    slopes.sort(kind="mergesort")
    return slopes


def _select(slopes: np.ndarray, positions: Sequence[int]) -> Dict[int, float]:
    """Values at 0-based sorted positions. Partitions slopes in place."""
    wanted = sorted(set(positions))
    slopes.partition(wanted)
    return {p: float(slopes[p]) for p in wanted}


def _rank_positions(rank: float, count: int) -> Tuple[int, int, float]:
    """1-based rank clamped to [1, N] as (lower, upper, fraction) over 0-based positions."""
    rank = min(max(rank, 1.0), float(count))
    lower = int(math.floor(rank))
    fraction = rank - lower
    upper = lower if lower >= count or fraction == 0.0 else lower + 1
    return lower - 1, upper - 1, fraction


def _median_and_interval(
    slopes: np.ndarray, var_s: float, confidence: float
) -> Tuple[float, float, float]:
    count = len(slopes)
    c_alpha = normal_quantile(1.0 - (1.0 - confidence) / 2.0) * math.sqrt(var_s)
    ranks = [(count - c_alpha) / 2.0, (count + c_alpha) / 2.0 + 1.0]
    limits = [_rank_positions(rank, count) for rank in ranks]
    middle = [(count - 1) // 2, count // 2]

    values = _select(slopes, middle + [p for lower, upper, _ in limits for p in (lower, upper)])
    median = (values[middle[0]] + values[middle[1]]) / 2.0
    lower_limit, upper_limit = (
        values[lower] + fraction * (values[upper] - values[lower]) if upper != lower else values[lower]
        for lower, upper, fraction in limits
    )
    return median, lower_limit, upper_limit


def theil_sen_slope(sample: SampleLike) -> float:
    """Median of the pairwise slopes (mean of the middle two when N is even)."""
    sample = as_sample(sample)
    _require(sample, 2, "Theil-Sen slope")
    slopes = _slope_set(sample)
    middle = [(len(slopes) - 1) // 2, len(slopes) // 2]
    values = _select(slopes, middle)
    return (values[middle[0]] + values[middle[1]]) / 2.0


def sen_intercept(sample: SampleLike, slope: float) -> float:
    """median(x_i - slope * t_i)"""
    sample = as_sample(sample)
    _require(sample, 2, "Sen intercept")
    return float(np.median(sample.x() - slope * sample.t()))


def _check_interval_inputs(sample: Sample, confidence: float):
    _require(sample, MIN_TREND_N, "Sen confidence interval")
    if not 0.0 < confidence < 1.0:
        raise InputValidationError(f"confidence must lie in (0, 1), got {confidence}")


def sen_confidence_interval(sample: SampleLike, confidence: float = 0.95) -> Tuple[float, float]:
    """
    Sen's nonparametric interval for the slope.

    C = z_{1-a/2} * sqrt(Var(S)); the limits are the ordered slopes at ranks
    M1 = (N - C)/2 and M2 + 1 with M2 = (N + C)/2.
    """
    sample = as_sample(sample)
    _check_interval_inputs(sample, confidence)
    var_s = mk_variance(sample.n, tie_summary(sample))
    _, lower, upper = _median_and_interval(_slope_set(sample), var_s, confidence)
    return lower, upper


def sen_estimate(sample: SampleLike, confidence: float = 0.95) -> SenEstimate:
    """Slope, intercept and confidence interval from a single pass over the slope set."""
    sample = as_sample(sample)
    _check_interval_inputs(sample, confidence)
    var_s = mk_variance(sample.n, tie_summary(sample))
    slope, lower, upper = _median_and_interval(_slope_set(sample), var_s, confidence)
    return SenEstimate(
        slope=slope,
        intercept=sen_intercept(sample, slope),
        ci_lower=lower,
        ci_upper=upper,
        confidence=confidence,
        n_pairs=_pair_count(sample.n),
    )


# Anomalies
def standardized_anomalies(sample: SampleLike) -> AnomalySeries:
    """(x_i - mean) / s with the n-1 sample standard deviation."""
    sample = as_sample(sample)
    _require(sample, 2, "standardized anomalies")
    x = sample.x()
    mean = float(np.mean(x))
    sd = float(np.std(x, ddof=1))
    if sd == 0.0 or np.ptp(x) == 0.0:
        raise DegenerateError("standardized anomalies are undefined for a constant series")
    return AnomalySeries(
        anomalies=((x - mean) / sd).tolist(),
        source_mean=mean,
        source_sd=sd,
    )
