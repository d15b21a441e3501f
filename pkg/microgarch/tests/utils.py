"""Brute-force reference statistics, and a predictor that reads the full state.
The statistics share no code with the library: sums are exact over fractions, and
only the final square root or CDF is taken in floats."""
import math
from fractions import Fraction
from typing import TYPE_CHECKING, Sequence

import numpy as np

from microgarch.params import MicroParams
from microgarch.traders.functions import ExpectationFunction

if TYPE_CHECKING:
    from microgarch.engine import MarketState


def _central(xs: Sequence[float]) -> list[Fraction]:
    exact = [Fraction(x) for x in xs]
    mean = sum(exact, Fraction(0)) / len(exact)
    return [x - mean for x in exact]


def _moment(dev: list[Fraction], power: int) -> Fraction:
    return sum((d**power for d in dev), Fraction(0)) / len(dev)


def oracle_skewness(xs: Sequence[float]) -> float:
    dev = _central(xs)
    m2, m3 = _moment(dev, 2), _moment(dev, 3)
    squared = m3 * m3 / (m2 * m2 * m2)
    return math.copysign(math.sqrt(squared), m3)


def oracle_kurtosis(xs: Sequence[float]) -> float:
    dev = _central(xs)
    m2, m4 = _moment(dev, 2), _moment(dev, 4)
    return float(m4 / (m2 * m2))


def oracle_sq_autocorrelation(xs: Sequence[float], lag: int) -> float:
    dev = _central([x * x for x in xs])
    n = len(dev)
    num = sum((dev[t] * dev[t - lag] for t in range(lag, n)), Fraction(0))
    den = sum((d * d for d in dev), Fraction(0))
    return float(num / den)


def _normal_cdf(x: float, mean: float, std: float) -> float:
    return 0.5 * (1.0 + math.erf((x - mean) / (std * math.sqrt(2.0))))


def _mean_std(xs: Sequence[float]) -> tuple[float, float]:
    dev = _central(xs)
    mean = sum((Fraction(x) for x in xs), Fraction(0)) / len(xs)
    return float(mean), math.sqrt(float(_moment(dev, 2)))


def oracle_ks(xs: Sequence[float]) -> float:
    """the largest CDF gap, checked on both sides of every step of the empirical CDF"""
    mean, std = _mean_std(xs)
    ordered = sorted(xs)
    n = len(ordered)
    worst = 0.0
    for i, x in enumerate(ordered):
        f = _normal_cdf(x, mean, std)
        worst = max(worst, (i + 1) / n - f, f - i / n)
    return worst


def ks_grid_scan(xs: Sequence[float], points: int = 20001) -> float:
    """the largest CDF gap over a dense grid, plus the points just left of each
    sample value where the empirical CDF is still on its lower step"""
    mean, std = _mean_std(xs)
    ordered = np.sort(np.asarray(xs, dtype=float))
    n = len(ordered)
    grid = np.linspace(ordered[0] - 5 * std, ordered[-1] + 5 * std, points)
    edges = np.nextafter(ordered, -np.inf)
    worst = 0.0
    for x in np.concatenate([grid, ordered, edges]).tolist():
        ecdf = np.searchsorted(ordered, x, side="right") / n
        worst = max(worst, abs(ecdf - _normal_cdf(x, mean, std)))
    return worst


def random_micro_params(gen: np.random.Generator) -> MicroParams:
    """valid, stationary parameters: rho * k stays below 0.5 and the trader ratios
    and risk aversions below 1 and 1.4, so alpha + beta < 0.98"""
    rho = float(gen.uniform(0.5, 5.0))
    return MicroParams(
        rho=rho,
        k=float(gen.uniform(0.1, 1.0)) * 0.5 / rho,
        p1=float(gen.uniform(0.0, 1.0)),
        p2=float(gen.uniform(0.0, 1.0)),
        lam=float(gen.uniform(0.1, 1.4)),
        gamma=float(gen.uniform(0.1, 1.4)),
        s_liquidity=float(gen.uniform(0.5, 3.0)),
    )


class LaggedPredictor(ExpectationFunction):
    """reads the last residual as well as the fundamental variable"""

    tag = "lagged"

    def __call__(self, x: float) -> float:
        return 0.1 * x

    def predict(self, state: "MarketState") -> float:
        return 0.1 * state.x_prev + 0.5 * state.u_prev
