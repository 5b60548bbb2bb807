"""
Normal distribution utilities and normality diagnostics.

The Shapiro-Wilk test follows Royston's AS R94 algorithm (valid for
3 <= n <= 5000): polynomial approximations of the expected normal order
statistics give the weights, and a normalizing transformation of 1 - W gives
the p-value.
"""
from typing import Sequence, Union

import numpy as np
from scipy import special

from climtrend.config import settings
from climtrend.exceptions import DegenerateError, InputValidationError, SampleSizeError
from climtrend.logger import logger
from climtrend.schemas import NormalityResult, QQData, Sample

SampleLike = Union[Sample, Sequence[float], np.ndarray]

# AS R94 polynomial coefficients, highest degree first (np.polyval order)
_C1 = [-2.706056, 4.434685, -2.071190, -0.147981, 0.221157, 0.0]
_C2 = [-3.582633, 5.682633, -1.752461, -0.293762, 0.042981, 0.0]
_C3 = [-0.0006714, 0.025054, -0.39978, 0.5440]
_C4 = [-0.0020322, 0.062767, -0.77857, 1.3822]
_C5 = [0.0038915, -0.083751, -0.31082, -1.5861]
_C6 = [0.0030302, -0.082676, -0.4803]
_G = [0.459, -2.273]

_SMALL = 1e-19
_PI6 = 1.90985931710274
_STQR = 1.04719755119660


def _as_sample(sample: SampleLike) -> Sample:
    if isinstance(sample, Sample):
        return sample
    try:
        return Sample(values=np.asarray(sample, dtype=np.float64).tolist())
    except ValueError as e:
        raise InputValidationError(f"invalid sample: {e}") from e


def normal_cdf(z: float) -> float:
    """Standard normal CDF."""
    return float(special.ndtr(z))


def normal_quantile(p: float) -> float:
    """Inverse standard normal CDF."""
    if not 0.0 < p < 1.0:
        raise InputValidationError(f"quantile probability must lie in (0, 1), got {p}")
    return float(special.ndtri(p))


def two_sided_p_value(z: float) -> float:
    """2 * (1 - Phi(|z|)), evaluated in the lower tail to keep precision."""
    return min(1.0, 2.0 * float(special.ndtr(-abs(z))))


def _swilk_weights(n: int) -> np.ndarray:
    """Antisymmetric AS R94 weights for the sorted sample; unit sum of squares."""
    half = n // 2
    a = np.zeros(half)
    if n == 3:
        a[0] = np.sqrt(0.5)
    else:
        m = special.ndtri((np.arange(1, half + 1) - 0.375) / (n + 0.25))
        summ2 = 2.0 * np.sum(m ** 2)
        ssumm2 = np.sqrt(summ2)
        rsn = 1.0 / np.sqrt(n)
        a1 = np.polyval(_C1, rsn) - m[0] / ssumm2

        if n > 5:
            first = 2
            a2 = -m[1] / ssumm2 + np.polyval(_C2, rsn)
            fac = np.sqrt((summ2 - 2.0 * m[0] ** 2 - 2.0 * m[1] ** 2) / (1.0 - 2.0 * a1 ** 2 - 2.0 * a2 ** 2))
            a[1] = a2
        else:
            first = 1
            fac = np.sqrt((summ2 - 2.0 * m[0] ** 2) / (1.0 - 2.0 * a1 ** 2))
        a[0] = a1
        a[first:] = -m[first:] / fac

    weights = np.zeros(n)
    weights[:half] = -a
    weights[n - half:] = a[::-1]
    return weights


def _swilk_p_value(w: float, n: int) -> float:
    if n == 3:
        return float(min(1.0, max(0.0, _PI6 * (np.arcsin(np.sqrt(w)) - _STQR))))

    w1 = 1.0 - w
    if w1 <= 0.0:
        return 1.0
    y = np.log(w1)
    if n <= 11:
        gamma = np.polyval(_G, n)
        if y >= gamma:
            return _SMALL
        y = -np.log(gamma - y)
        m = np.polyval(_C3, n)
        s = np.exp(np.polyval(_C4, n))
    else:
        ln_n = np.log(n)
        m = np.polyval(_C5, ln_n)
        s = np.exp(np.polyval(_C6, ln_n))

    return float(special.ndtr(-(y - m) / s))


def shapiro_wilk(sample: SampleLike) -> NormalityResult:
    """
    Shapiro-Wilk W statistic and p-value (AS R94).
    """
    sample = _as_sample(sample)
    n = sample.n
    if n < 3 or n > settings.SHAPIRO_MAX_N:
        raise SampleSizeError(f"Shapiro-Wilk needs 3 <= n <= {settings.SHAPIRO_MAX_N}, got n={n}")

    x = np.sort(sample.x())
    spread = x[-1] - x[0]
    if spread < _SMALL:
        raise DegenerateError("Shapiro-Wilk is undefined for a zero-variance sample")

    # Centre and scale by the range; W is affine invariant
    x = (x - x.mean()) / spread
    weights = _swilk_weights(n)
    w = float(np.dot(weights, x) ** 2 / np.dot(x, x))
    w = min(w, 1.0)
    p_value = _swilk_p_value(w, n)

    logger.debug("Shapiro-Wilk computed", n=n, w=w, p_value=p_value)
    return NormalityResult(n=n, w=w, p_value=p_value)


def qq_points(sample: SampleLike) -> QQData:
    """
    Normal Q-Q coordinates using Blom plotting positions (i - 0.375) / (n + 0.25).
    """
    sample = _as_sample(sample)
    n = sample.n
    if n < 1:
        raise SampleSizeError("Q-Q plot needs at least one observation")

    ordered = np.sort(sample.x())
    positions = (np.arange(1, n + 1) - 0.375) / (n + 0.25)
    theoretical = special.ndtri(positions)
    # Exact antisymmetry about zero
    theoretical = (theoretical - theoretical[::-1]) / 2.0

    correlation = None
    if n >= 2 and np.ptp(ordered) > 0:
        correlation = float(np.corrcoef(theoretical, ordered)[0, 1])

    return QQData(
        points=[(float(q), float(v)) for q, v in zip(theoretical, ordered)],
        correlation=correlation,
    )
