import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, Sequence

import numpy as np
import structlog
from statsmodels.stats.diagnostic import acorr_ljungbox

from microgarch import exc, presets
from microgarch.stats import moments

LOG = structlog.get_logger(__name__)


def stars(p_value: float) -> str:
    """The significance annotation of a p-value: ``***`` below 0.01, ``**`` below 0.05,
    ``*`` below 0.1, else empty."""
    for level, mark in presets.star_levels:
        if p_value < level:
            return mark
    return ""


@dataclass(frozen=True)
class StatisticResult:
    """One statistic with its one-sided p-value and whether the stylized fact is
    present at the report's significance level."""

    value: float
    p_value: float
    verdict: bool

    @property
    def stars(self) -> str:
        return stars(self.p_value)

    def as_dict(self) -> dict[str, Any]:
        return {
            "value": self.value,
            "p_value": self.p_value,
            "verdict": self.verdict,
            "stars": self.stars,
        }


@dataclass(frozen=True)
class StylizedFactsReport:
    """The stylized facts of one return series.

    :param sample_size: Number of returns.
    :param significance: Level the verdicts were decided at.
    :param skewness: Negative skewness.
    :param kurtosis: Kurtosis above 3.
    :param ks: Non-normality.
    :param sq_autocorr: Positive autocorrelation of squared returns, by lag.
    :param ljung_box: Joint test of squared-return autocorrelation up to
        ``ljung_box_lags``, or None if the series is too short for it.
    """

    sample_size: int
    significance: float
    skewness: StatisticResult
    kurtosis: StatisticResult
    ks: StatisticResult
    sq_autocorr: dict[int, StatisticResult]
    ljung_box: Optional[StatisticResult] = None
    ljung_box_lags: Optional[int] = None

    @property
    def clustering(self) -> StatisticResult:
        """The lag-1 squared autocorrelation, which decides volatility clustering."""
        return self.sq_autocorr[1]

    @property
    def verdicts(self) -> dict[str, bool]:
        return {
            "skewness": self.skewness.verdict,
            "kurtosis": self.kurtosis.verdict,
            "ks": self.ks.verdict,
            "sq_autocorr": self.clustering.verdict,
        }

    @property
    def all_present(self) -> bool:
        return all(self.verdicts.values())

    def as_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "sample_size": self.sample_size,
            "significance": self.significance,
            "skewness": self.skewness.as_dict(),
            "kurtosis": self.kurtosis.as_dict(),
            "ks": self.ks.as_dict(),
            "sq_autocorr": {
                str(lag): result.as_dict() for lag, result in self.sq_autocorr.items()
            },
        }
        if self.ljung_box is not None:
            out["ljung_box"] = dict(self.ljung_box.as_dict(), lags=self.ljung_box_lags)
        return out


def _returns_of(series: Any) -> np.ndarray:
    # accepts a ReturnSeries or anything array-like
    returns = getattr(series, "returns", series)
    return np.asarray(returns, dtype=float)


def evaluate_stylized_facts(
    series: Any,
    significance: float = presets.reference_stats["significance"],
    *,
    lags: Iterable[int] = (1,),
    ljung_box_lags: Optional[int] = presets.reference_stats["ljung_box_lags"],
) -> StylizedFactsReport:
    """Run the stylized-facts battery on a return series.

    Every fact is a one-sided test: skewness below 0 and kurtosis above 3 are z-tests
    with the normal-theory standard errors, non-normality uses the asymptotic
    Kolmogorov distribution, and squared-return autocorrelation is a z-test with
    standard error ``1/sqrt(T)``. Lag 1 always decides the clustering verdict, other
    lags are reported alongside.

    :param series: A :class:`~microgarch.engine.ReturnSeries` or a sequence of returns.
    :param significance: The level at which a fact counts as present.
    :param lags: Lags of the squared-return autocorrelation to report.
    :param ljung_box_lags: Lags of the Ljung-Box test on squared returns, or None to
        skip it. Skipped when the series is not longer than this.
    :raises InsufficientSample: With fewer than 30 returns.
    :raises DegenerateSample: If the series or its square is constant.
    """
    if not 0 < significance < 1:
        raise exc.InvalidParameter(
            name="significance", value=significance, reason="must be in (0, 1)"
        )
    returns = _returns_of(series)
    n = len(returns)
    if n < presets.min_report_length:
        raise exc.InsufficientSample(required=presets.min_report_length, actual=n)

    def decide(value: float, p_value: float) -> StatisticResult:
        if not (math.isfinite(value) and 0.0 <= p_value <= 1.0):
            raise exc.DegenerateSample(
                statistic="report", reason=f"statistic {value} with p-value {p_value}"
            )
        return StatisticResult(
            value=value, p_value=p_value, verdict=p_value < significance
        )

    skew = moments.skewness(returns)
    kurt = moments.kurtosis(returns)
    ks = moments.ks_statistic(returns)

    sq_autocorr = {}
    for lag in sorted({1, *lags}):
        acf = moments.sq_autocorrelation(returns, lag)
        sq_autocorr[lag] = decide(acf, moments.sq_autocorrelation_pvalue(acf, n))

    ljung_box = None
    if ljung_box_lags is not None and n > ljung_box_lags:
        lb = acorr_ljungbox(returns**2, lags=[ljung_box_lags], return_df=True)
        ljung_box = decide(
            float(lb["lb_stat"].iloc[0]), float(lb["lb_pvalue"].iloc[0])
        )
    else:
        ljung_box_lags = None

    report = StylizedFactsReport(
        sample_size=n,
        significance=significance,
        skewness=decide(skew, moments.skewness_pvalue(skew, n)),
        kurtosis=decide(kurt, moments.kurtosis_pvalue(kurt, n)),
        ks=decide(ks, moments.ks_pvalue(ks, n)),
        sq_autocorr=sq_autocorr,
        ljung_box=ljung_box,
        ljung_box_lags=ljung_box_lags,
    )
    LOG.debug("Evaluated stylized facts", sample_size=n, verdicts=report.verdicts)
    return report


@dataclass(frozen=True)
class BatchSummary:
    """Medians of each statistic and pass rates of each verdict over a batch."""

    runs: int
    medians: dict[str, float] = field(default_factory=dict)
    pass_rates: dict[str, float] = field(default_factory=dict)

    def as_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"runs": self.runs}
        out.update({f"{k}_median": v for k, v in self.medians.items()})
        out.update({f"{k}_pass_rate": v for k, v in self.pass_rates.items()})
        return out


def summarize_batch(reports: Sequence[StylizedFactsReport]) -> BatchSummary:
    """Summarize the reports of a batch of runs.

    :raises InvalidParameter: If there are no reports.
    """
    if not reports:
        raise exc.InvalidParameter(name="reports", value=[], reason="is empty")

    values = {
        "skewness": [r.skewness.value for r in reports],
        "kurtosis": [r.kurtosis.value for r in reports],
        "ks": [r.ks.value for r in reports],
        "sq_autocorr": [r.clustering.value for r in reports],
    }
    medians = {k: float(np.median(v)) for k, v in values.items()}
    pass_rates = {
        k: sum(r.verdicts[k] for r in reports) / len(reports) for k in values
    }
    return BatchSummary(runs=len(reports), medians=medians, pass_rates=pass_rates)
