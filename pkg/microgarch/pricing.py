from dataclasses import dataclass

from microgarch import exc
from microgarch.params import MicroParams
from microgarch.traders.utility import UtilityValue


@dataclass(frozen=True)
class OrderVolumes:
    """Total buy and sell orders of one step. The two always add up to the constant
    order scale ``S``. Either side may be negative when utilities or the shock are
    extreme; that is kept as is, the pricing identity needs the unclamped values."""

    buy: float
    sell: float

    @property
    def total(self) -> float:
        return self.buy + self.sell

    @property
    def imbalance(self) -> float:
        """``(buy - sell) / (buy + sell)``"""
        return (self.buy - self.sell) / self.total

    @property
    def has_negative(self) -> bool:
        return self.buy < 0 or self.sell < 0


def _signal(u_fund: UtilityValue, u_ai: UtilityValue, params: MicroParams) -> float:
    # utility-weighted demand of the liquidity takers
    return params.p1 * u_fund.value + params.p2 * u_ai.value


def order_volumes(
    u_fund: UtilityValue,
    u_ai: UtilityValue,
    eps: float,
    params: MicroParams,
) -> OrderVolumes:
    """Aggregate the orders of the three trader types. Half of ``S`` goes to each side,
    shifted by the utility-weighted demand of fundamental and AI traders and by the
    liquidity-scaled shock.

    :param u_fund: Expected utility of the fundamental traders.
    :param u_ai: Expected utility of the AI traders.
    :param eps: The standard-normal shock of this step. It is the same shock that
        drives the return residual.
    :param params: The market parameters.
    :return: The buy and sell volumes.
    """
    signal = _signal(u_fund, u_ai, params)
    half = 0.5 * params.s_liquidity
    shift = half * signal + half * params.k * (1.0 + signal) * eps
    return OrderVolumes(buy=half + shift, sell=half - shift)


def step_return(vols: OrderVolumes, params: MicroParams) -> float:
    """The return implied by the order imbalance, ``rho (A^b - A^s) / (A^b + A^s)``.

    :param vols: The step's order volumes.
    :param params: The market parameters, providing ``rho``.
    :raises InvalidParameter: If the total volume is zero.
    """
    if vols.total == 0:
        raise exc.InvalidParameter(
            name="buy + sell", value=vols.total, reason="must be nonzero"
        )
    return params.rho * vols.imbalance


def step_return_closed_form(
    u_fund: UtilityValue,
    u_ai: UtilityValue,
    eps: float,
    params: MicroParams,
) -> float:
    """The same return as ``step_return(order_volumes(...))`` with ``S`` cancelled:
    ``rho a + rho k (1 + a) eps`` where ``a`` is the utility-weighted demand.

    :param u_fund: Expected utility of the fundamental traders.
    :param u_ai: Expected utility of the AI traders.
    :param eps: The standard-normal shock of this step.
    :param params: The market parameters.
    """
    signal = _signal(u_fund, u_ai, params)
    return params.rho * signal + params.rho * params.k * (1.0 + signal) * eps


def conditional_mean(
    u_fund: UtilityValue,
    u_ai: UtilityValue,
    params: MicroParams,
) -> float:
    """``E_{t-1}[r_t] = rho (p1 U + p2 M)``, the part of the return known before the
    shock."""
    return params.rho * _signal(u_fund, u_ai, params)
