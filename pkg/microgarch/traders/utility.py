import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

from microgarch import exc

if TYPE_CHECKING:
    from microgarch.engine import MarketState
    from microgarch.params import MicroParams


@dataclass(frozen=True)
class UtilityValue:
    """An expected utility in the mean / standard-deviation family. Dimensionless."""

    value: float

    def __float__(self) -> float:
        return self.value


def fundamental_utility(
    x_prev: float,
    sigma_prev: float,
    params: "MicroParams",
) -> UtilityValue:
    """Expected utility of the fundamental traders, ``g(x_{t-1}) - lambda sigma_{t-1}``.
    Strictly decreasing in the volatility.

    :param x_prev: The fundamental variable.
    :param sigma_prev: The previous volatility, ``>= 0``.
    :param params: The market parameters, providing ``g`` and ``lambda``.
    :raises InvalidParameter: If ``sigma_prev`` is negative.
    """
    if not sigma_prev >= 0:
        raise exc.InvalidParameter(
            name="sigma_prev", value=sigma_prev, reason="must be >= 0"
        )
    return UtilityValue(params.g(x_prev) - params.lam * sigma_prev)


def ai_utility(
    x_prev: float,
    u_prev: float,
    params: "MicroParams",
    *,
    state: Optional["MarketState"] = None,
) -> UtilityValue:
    """Expected utility of the AI traders, ``h(x_{t-1}, I_{t-1}) - gamma |u_{t-1}|``:
    the model prediction penalized by the size of the model's last miss.

    :param x_prev: The fundamental variable.
    :param u_prev: The previous residual, i.e. the last prediction error.
    :param params: The market parameters, providing ``h`` and ``gamma``.
    :param state: The full state at ``t-1``. When given, ``h`` may read more of the
        information set than ``x_prev``.
    """
    prediction = params.h.predict(state) if state is not None else params.h(x_prev)
    return UtilityValue(prediction - params.gamma * math.fabs(u_prev))
