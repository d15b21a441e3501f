import math
from enum import Enum
from typing import TYPE_CHECKING, Callable, NamedTuple, Optional

import numpy as np
import structlog

from microgarch import exc
from microgarch.context import RunContext
from microgarch.params import GarchParams, MicroParams
from microgarch.rng import SeededRNG

if TYPE_CHECKING:
    from microgarch.engine import MarketState

LOG = structlog.get_logger(__name__)


class GarchState(NamedTuple):
    """The lagged quantities a GARCH(1,1) step needs: the residual ``u_{t-1}`` and the
    variance ``sigma^2_{t-1}``."""

    u_prev: float
    sigma2_prev: float


def conditional_variance(params: GarchParams, state: GarchState) -> float:
    """``omega + alpha u_{t-1}^2 + beta sigma^2_{t-1}``"""
    return (
        params.omega
        + params.alpha * state.u_prev * state.u_prev
        + params.beta * state.sigma2_prev
    )


def garch_step(
    params: GarchParams,
    state: GarchState,
    eps: float,
) -> tuple[float, GarchState]:
    """Advance a GARCH(1,1) process by one step.

    :param params: The step's parameters. ``f_value`` is the conditional mean.
    :param state: The lagged residual and variance.
    :param eps: The standard-normal shock.
    :raises InvalidParameter: If the lagged variance is negative.
    :return: The return and the new state ``(u_t, sigma^2_t)``.
    """
    if not state.sigma2_prev >= 0:
        raise exc.InvalidParameter(
            name="sigma2_prev", value=state.sigma2_prev, reason="must be >= 0"
        )
    sigma2 = conditional_variance(params, state)
    u = math.sqrt(sigma2) * eps
    return params.f_value + u, GarchState(u_prev=u, sigma2_prev=sigma2)


def simulate_garch(
    params: GarchParams,
    length: int,
    seed: int,
    *,
    sigma2_0: Optional[float] = None,
) -> np.ndarray:
    """Generate a reference GARCH(1,1) return series with a constant conditional mean.

    :param params: Constant parameters for every step.
    :param length: Number of returns.
    :param seed: Seed of the random generator.
    :param sigma2_0: The starting variance. Defaults to the unconditional variance.
    :return: The returns.
    """
    if length < 1:
        raise exc.InvalidParameter(name="length", value=length, reason="must be >= 1")

    log = LOG.bind(seed=seed, length=length)
    log.info("Simulating reference GARCH series")

    shocks = SeededRNG(seed).standard_normal(length)
    if sigma2_0 is None:
        sigma2_0 = params.unconditional_variance
    state = GarchState(u_prev=0.0, sigma2_prev=sigma2_0)

    returns = np.empty(length)
    for t, eps in enumerate(shocks.tolist()):
        returns[t], state = garch_step(params, state, eps)

    log.debug("Reference GARCH series done", final_sigma2=state.sigma2_prev)
    return returns


def micro_to_garch(
    params: MicroParams,
    x_prev: float,
    u_prev: float,
    sigma_prev: float,
    *,
    state: Optional["MarketState"] = None,
) -> GarchParams:
    """The GARCH(1,1) parameters implied by the trader model at one step.

    ``omega`` and ``f`` depend on the state through ``g(x)``, ``h(x)``, ``sigma`` and
    ``|u|``; ``alpha`` and ``beta`` do not depend on the state at all.

    :param params: The market parameters.
    :param x_prev: The fundamental variable ``x_{t-1}``.
    :param u_prev: The previous residual.
    :param sigma_prev: The previous volatility, ``>= 0``.
    :param state: The full state at ``t-1``. When given, ``h`` reads it through
        :meth:`~microgarch.traders.functions.ExpectationFunction.predict`, the same
        way the AI traders do.
    :raises InvalidParameter: If ``sigma_prev`` is negative.
    """
    if not sigma_prev >= 0:
        raise exc.InvalidParameter(
            name="sigma_prev", value=sigma_prev, reason="must be >= 0"
        )
    g = params.g(x_prev)
    h = params.h.predict(state) if state is not None else params.h(x_prev)
    rk2 = params.noise_variance
    omega = rk2 * (1.0 + (params.p1 * g) ** 2 + (params.p2 * h) ** 2)
    f_value = params.rho * (
        params.p1 * (g - params.lam * sigma_prev)
        + params.p2 * (h - params.gamma * math.fabs(u_prev))
    )
    return GarchParams(
        omega=omega,
        f_value=f_value,
        alpha=params.alpha,
        beta=params.beta,
    )


def representative_garch(params: MicroParams) -> GarchParams:
    """The mapping evaluated at ``x = u = sigma = 0``, for reporting a single set of
    constants comparable with a textbook GARCH(1,1)."""
    return micro_to_garch(params, x_prev=0.0, u_prev=0.0, sigma_prev=0.0)


def stationarity_margin(params: MicroParams) -> float:
    """``1 - (alpha + beta)`` of the mapped GARCH. Positive iff the market maps to a
    stationary process. :class:`MicroParams` refuses to exist otherwise, so this is
    always positive for a constructed instance."""
    return params.stationarity_margin


def _check_zero(name: str, params: MicroParams, **ratios: float) -> None:
    nonzero = {k: v for k, v in ratios.items() if v != 0}
    if nonzero:
        raise exc.ReductionMismatch(
            reduction=name,
            ratios=nonzero,
            ctx=RunContext(params=params.as_dict()),
        )


def reduce_noise_only(
    params: MicroParams,
    x_prev: float = 0.0,
    u_prev: float = 0.0,
    sigma_prev: float = 0.0,
) -> GarchParams:
    """The market with only noise traders: ``omega = rho^2 k^2`` and no mean, no
    shock response and no volatility clustering.

    :raises ReductionMismatch: If ``p1`` or ``p2`` is nonzero.
    """
    _check_zero("noise-only", params, p1=params.p1, p2=params.p2)
    return GarchParams(omega=params.noise_variance, f_value=0.0, alpha=0.0, beta=0.0)


def reduce_noise_fundamental(
    params: MicroParams,
    x_prev: float = 0.0,
    u_prev: float = 0.0,
    sigma_prev: float = 0.0,
) -> GarchParams:
    """Noise and fundamental traders: volatility clustering through ``beta`` but no
    response to past shocks.

    :raises ReductionMismatch: If ``p2`` is nonzero.
    """
    _check_zero("noise+fundamental", params, p2=params.p2)
    g = params.g(x_prev)
    return GarchParams(
        omega=params.noise_variance * (1.0 + (params.p1 * g) ** 2),
        f_value=params.rho * (params.p1 * (g - params.lam * sigma_prev)),
        alpha=0.0,
        beta=params.beta,
    )


def reduce_noise_ai(
    params: MicroParams,
    x_prev: float = 0.0,
    u_prev: float = 0.0,
    sigma_prev: float = 0.0,
) -> GarchParams:
    """Noise and AI traders: response to past shocks through ``alpha`` but no
    volatility clustering.

    :raises ReductionMismatch: If ``p1`` is nonzero.
    """
    _check_zero("noise+ai", params, p1=params.p1)
    h = params.h(x_prev)
    return GarchParams(
        omega=params.noise_variance * (1.0 + (params.p2 * h) ** 2),
        f_value=params.rho * (params.p2 * (h - params.gamma * math.fabs(u_prev))),
        alpha=params.alpha,
        beta=0.0,
    )


Reduction = Callable[..., GarchParams]


class MarketRegime(Enum):
    """Which trader types are active, by the ratios of fundamental and AI traders."""

    NOISE_ONLY = "noise-only market"
    NOISE_FUNDAMENTAL = "noise and fundamental traders"
    NOISE_AI = "noise and AI traders"
    FULL = "noise, fundamental, and AI traders"

    @property
    def reduction(self) -> Optional[Reduction]:
        """The closed-form reduction for this market, or None for the full market."""
        return {
            MarketRegime.NOISE_ONLY: reduce_noise_only,
            MarketRegime.NOISE_FUNDAMENTAL: reduce_noise_fundamental,
            MarketRegime.NOISE_AI: reduce_noise_ai,
        }.get(self)


def market_regime(params: MicroParams) -> MarketRegime:
    if params.p1 == 0 and params.p2 == 0:
        return MarketRegime.NOISE_ONLY
    if params.p2 == 0:
        return MarketRegime.NOISE_FUNDAMENTAL
    if params.p1 == 0:
        return MarketRegime.NOISE_AI
    return MarketRegime.FULL
