"""The statistics of the stylized-facts battery. Moments use the plain ``1/T``
normalization, without bias corrections."""
import math
from typing import Sequence

import numpy as np
from scipy import stats

from microgarch import exc

ArrayLike = Sequence[float] | np.ndarray


def _as_sample(series: ArrayLike, statistic: str, required: int) -> np.ndarray:
    sample = np.asarray(series, dtype=float)
    if sample.ndim != 1:
        raise exc.DegenerateSample(statistic=statistic, reason="series must be 1-d")
    if len(sample) < required:
        raise exc.InsufficientSample(required=required, actual=len(sample))
    if not np.all(np.isfinite(sample)):
        raise exc.DegenerateSample(
            statistic=statistic, reason="series has non-finite values"
        )
    if np.ptp(sample) == 0:
        raise exc.DegenerateSample(statistic=statistic, reason="series is constant")
    return sample


def _central_moments(sample: np.ndarray, statistic: str) -> tuple[float, float, float]:
    """The second, third and fourth ``1/T`` central moments."""
    dev = sample - sample.mean()
    # a second pass removes the rounding error left in the mean
    dev -= dev.mean()
    sq = dev * dev
    m2 = float(sq.mean())
    if m2 == 0:
        raise exc.DegenerateSample(statistic=statistic, reason="variance underflows")
    return m2, float((sq * dev).mean()), float((sq * sq).mean())


def _finite(value: float, statistic: str) -> float:
    if not math.isfinite(value):
        raise exc.DegenerateSample(statistic=statistic, reason="result is not finite")
    return value


def skewness(series: ArrayLike) -> float:
    """Third standardized central moment. Negative for a long left tail.

    :raises InsufficientSample: With fewer than 3 observations.
    :raises DegenerateSample: If the series is constant.
    """
    sample = _as_sample(series, "skewness", 3)
    m2, m3, _ = _central_moments(sample, "skewness")
    return _finite(m3 / m2**1.5, "skewness")


def kurtosis(series: ArrayLike) -> float:
    """Fourth standardized central moment, not in excess: a normal sample gives about 3.

    :raises InsufficientSample: With fewer than 4 observations.
    :raises DegenerateSample: If the series is constant.
    """
    sample = _as_sample(series, "kurtosis", 4)
    m2, _, m4 = _central_moments(sample, "kurtosis")
    return _finite(m4 / (m2 * m2), "kurtosis")


def ks_statistic(series: ArrayLike) -> float:
    """Kolmogorov-Smirnov distance between the empirical CDF and the normal CDF with
    the sample's mean and standard deviation. Both step edges of the empirical CDF are
    compared at every sample point.

    :raises InsufficientSample: With fewer than 2 observations.
    :raises DegenerateSample: If the series is constant.
    """
    sample = _as_sample(series, "ks_statistic", 2)
    fitted = stats.norm(loc=sample.mean(), scale=sample.std(ddof=0))
    result = stats.kstest(sample, fitted.cdf, method="asymp")
    return min(1.0, max(0.0, float(result.statistic)))


def ks_pvalue(statistic: float, n: int) -> float:
    """P-value of :func:`ks_statistic` from the asymptotic Kolmogorov distribution.
    The mean and variance are estimated from the same sample, so it is conservative.
    """
    return float(stats.kstwobign.sf(math.sqrt(n) * statistic))


def sq_autocorrelation(series: ArrayLike, lag: int) -> float:
    """Autocorrelation of the squared series at ``lag``, centered on the mean of the
    squared series and normalized by its full sum of squares. Lag 0 is 1.

    :raises InvalidParameter: If ``lag`` is negative.
    :raises InsufficientSample: If ``lag`` is not shorter than the series.
    :raises DegenerateSample: If the squared series is constant.
    """
    if lag < 0:
        raise exc.InvalidParameter(name="lag", value=lag, reason="must be >= 0")
    raw = np.asarray(series, dtype=float)
    if len(raw) <= lag:
        raise exc.InsufficientSample(required=lag + 1, actual=len(raw))
    squared = raw * raw
    if np.ptp(squared) == 0:
        raise exc.DegenerateSample(
            statistic="sq_autocorrelation", reason="squared series is constant"
        )

    dev = squared - squared.mean()
    n = len(dev)
    return float(np.dot(dev[lag:], dev[: n - lag]) / np.dot(dev, dev))


def skewness_pvalue(value: float, n: int) -> float:
    """One-sided z-test of skewness below 0, standard error ``sqrt(6/T)``."""
    return float(stats.norm.cdf(value / math.sqrt(6.0 / n)))


def kurtosis_pvalue(value: float, n: int) -> float:
    """One-sided z-test of kurtosis above 3, standard error ``sqrt(24/T)``."""
    return float(stats.norm.sf((value - 3.0) / math.sqrt(24.0 / n)))


def sq_autocorrelation_pvalue(value: float, n: int) -> float:
    """One-sided z-test of a positive autocorrelation, standard error ``1/sqrt(T)``."""
    return float(stats.norm.sf(value * math.sqrt(n)))
