import math
from dataclasses import dataclass, field, replace
from typing import Any

from microgarch import exc, presets
from microgarch.context import RunContext
from microgarch.traders.functions import (
    ExpectationFunction,
    ai_predictor,
    fundamental_expectation,
)


def _require_positive(name: str, value: float) -> None:
    if not (math.isfinite(value) and value > 0):
        raise exc.InvalidParameter(name=name, value=value, reason="must be > 0")


def _require_non_negative(name: str, value: float) -> None:
    if not (math.isfinite(value) and value >= 0):
        raise exc.InvalidParameter(name=name, value=value, reason="must be >= 0")


@dataclass(frozen=True)
class MicroParams:
    """The full parameter set of the three-trader market.

    :param rho: Coefficient of the order imbalance in the pricing rule.
    :param k: Order quantity generated by demand-supply imbalance, relative to the
        constant total order quantity. Larger means less liquid.
    :param s_liquidity: The constant total order scale ``S``. Returns do not depend on
        it.
    :param p1: Ratio of fundamental traders to noise traders.
    :param p2: Ratio of AI traders to noise traders.
    :param lam: Risk aversion ``lambda`` of the fundamental traders.
    :param gamma: Risk aversion of the AI traders.
    :param g_fn: Catalog tag of the fundamental expectation ``g``.
    :param h_fn: Catalog tag of the AI predictor ``h``.
    :raises InvalidParameter: If a field is out of range.
    :raises UnknownFunction: If a tag is not in the catalog.
    :raises NonStationaryParams: If ``rho^2 k^2 (p1^2 lam^2 + p2^2 gamma^2) >= 1``.
    """

    rho: float
    k: float
    p1: float
    p2: float
    lam: float
    gamma: float
    s_liquidity: float = 1.0
    g_fn: str = "log"
    h_fn: str = "ar"
    g: ExpectationFunction = field(init=False, repr=False, compare=False)
    h: ExpectationFunction = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        for name in ("rho", "k", "s_liquidity", "lam", "gamma"):
            _require_positive(name, getattr(self, name))
        for name in ("p1", "p2"):
            _require_non_negative(name, getattr(self, name))

        # frozen, so the resolved functions are set behind the dataclass' back
        object.__setattr__(self, "g", fundamental_expectation(self.g_fn))
        object.__setattr__(self, "h", ai_predictor(self.h_fn))

        if self.stationarity_margin <= 0:
            raise exc.NonStationaryParams(
                alpha=self.alpha,
                beta=self.beta,
                ctx=_ctx(self),
            )

    @property
    def noise_variance(self) -> float:
        """``rho^2 k^2``, the variance contributed by noise traders alone."""
        return (self.rho * self.k) ** 2

    @property
    def alpha(self) -> float:
        return self.noise_variance * (self.p2 * self.gamma) ** 2

    @property
    def beta(self) -> float:
        return self.noise_variance * (self.p1 * self.lam) ** 2

    @property
    def stationarity_margin(self) -> float:
        return 1.0 - (self.alpha + self.beta)

    def replace(self, **changes: Any) -> "MicroParams":
        """Returns a copy with some fields changed. ``lambda`` is accepted as an alias
        of ``lam``."""
        if "lambda" in changes:
            changes["lam"] = changes.pop("lambda")
        return replace(self, **changes)

    def as_dict(self) -> dict[str, Any]:
        """The parameters keyed the way the configuration file keys them."""
        return {
            "rho": self.rho,
            "k": self.k,
            "s_liquidity": self.s_liquidity,
            "p1": self.p1,
            "p2": self.p2,
            "lambda": self.lam,
            "gamma": self.gamma,
            "g_fn": self.g_fn,
            "h_fn": self.h_fn,
        }

    @classmethod
    def from_dict(cls, values: dict[str, Any]) -> "MicroParams":
        values = dict(values)
        if "lambda" in values:
            values["lam"] = values.pop("lambda")
        return cls(**values)

    @classmethod
    def reference(cls) -> "MicroParams":
        """The parameters of the reference experiment."""
        return cls.from_dict(presets.reference_market)


@dataclass(frozen=True)
class GarchParams:
    """Parameters of one GARCH(1,1) step.

    :param omega: Constant volatility term, ``> 0``.
    :param f_value: Conditional mean of the return at this step.
    :param alpha: Sensitivity to the squared past residual, ``>= 0``.
    :param beta: Persistence of the past variance, ``>= 0``.
    :raises InvalidParameter: If a field is out of range.
    :raises NonStationaryParams: If ``alpha + beta >= 1``. No slack is allowed.
    """

    omega: float
    f_value: float
    alpha: float
    beta: float

    def __post_init__(self) -> None:
        _require_positive("omega", self.omega)
        _require_non_negative("alpha", self.alpha)
        _require_non_negative("beta", self.beta)
        if not math.isfinite(self.f_value):
            raise exc.InvalidParameter(
                name="f_value", value=self.f_value, reason="must be finite"
            )
        if not self.alpha + self.beta < 1:
            raise exc.NonStationaryParams(alpha=self.alpha, beta=self.beta)

    @property
    def persistence(self) -> float:
        return self.alpha + self.beta

    @property
    def unconditional_variance(self) -> float:
        """``omega / (1 - alpha - beta)``, the long-run variance of the residual."""
        return self.omega / (1.0 - self.persistence)


def _ctx(params: MicroParams) -> RunContext:
    return RunContext(params=params.as_dict())
