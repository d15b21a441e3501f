import math
from abc import ABC, abstractmethod
from typing import TYPE_CHECKING, Callable, Optional

from microgarch import exc, presets

if TYPE_CHECKING:
    from microgarch.engine import MarketState


class ExpectationFunction(ABC):
    """This captures how a trader type turns the information available at ``t-1`` into
    an expected return. It is designed to be subclassed: fundamental traders use a
    monotone ``g`` of the fundamental variable, AI traders use a trained predictor
    ``h``.

    The default implementations only read the fundamental variable ``x_{t-1}``. A
    predictor that needs more of the information set can override :meth:`predict`,
    which receives the whole market state.
    """

    #: the catalog tag this function is registered under
    tag: str = ""

    @abstractmethod
    def __call__(self, x: float) -> float:
        """Evaluate the expectation for a fundamental variable.

        :param x: The fundamental variable ``x_{t-1}``.
        :return: The expected return.
        """
        raise NotImplementedError

    def predict(self, state: "MarketState") -> float:
        """Evaluate the expectation from the full market state. Override in a subclass
        to read lagged residuals or volatilities.

        :param state: The state at ``t-1``.
        :return: The expected return.
        """
        return self(state.x_prev)

    def __eq__(self, other: object) -> bool:
        return type(other) is type(self) and vars(other) == vars(self)

    def __hash__(self) -> int:
        return hash((type(self), self.tag))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.tag!r})"


class LogExpectation(ExpectationFunction):
    """``log(1 + max(floor, x))``. The clamp keeps the logarithm finite, so the result
    is never below ``log(1 + floor)``."""

    tag = "log"

    def __init__(self, floor: float = presets.log_expectation_floor):
        self.floor = floor

    def __call__(self, x: float) -> float:
        return math.log1p(max(self.floor, x))


class LinearExpectation(ExpectationFunction):
    tag = "linear"

    def __call__(self, x: float) -> float:
        return x


class TanhExpectation(ExpectationFunction):
    """A bounded monotone expectation."""

    tag = "tanh"

    def __call__(self, x: float) -> float:
        return math.tanh(x)


class ARPredictor(ExpectationFunction):
    """The trained autoregressive predictor ``coef * x``. Registered as ``ar`` with the
    default slope, and as ``ar:<coef>`` for any other slope."""

    def __init__(self, coef: float = presets.ar_coefficient):
        self.coef = coef
        self.tag = "ar" if coef == presets.ar_coefficient else f"ar:{coef!r}"

    def __call__(self, x: float) -> float:
        return self.coef * x


class ZeroPredictor(ExpectationFunction):
    """A predictor with no skill. The AI traders then only react to their past error."""

    tag = "zero"

    def __call__(self, x: float) -> float:
        return 0.0


def _parse_ar(arg: Optional[str]) -> ExpectationFunction:
    if arg is None:
        return ARPredictor()
    coef = float(arg)
    if not math.isfinite(coef):
        raise ValueError(f"coefficient {arg} is not finite")
    return ARPredictor(coef)


_G_CATALOG: dict[str, Callable[[Optional[str]], ExpectationFunction]] = {
    "log": lambda _: LogExpectation(),
    "linear": lambda _: LinearExpectation(),
    "tanh": lambda _: TanhExpectation(),
}

_H_CATALOG: dict[str, Callable[[Optional[str]], ExpectationFunction]] = {
    "ar": _parse_ar,
    "zero": lambda _: ZeroPredictor(),
}


def _lookup(
    catalog: dict[str, Callable[[Optional[str]], ExpectationFunction]],
    tag: str,
    kind: str,
) -> ExpectationFunction:
    name, _, arg = tag.partition(":")
    try:
        factory = catalog[name]
    except KeyError:
        raise exc.UnknownFunction(tag=tag, kind=kind, known=list(catalog))
    try:
        return factory(arg or None)
    except ValueError as e:
        raise exc.UnknownFunction(tag=tag, kind=kind, known=list(catalog)) from e


def fundamental_expectation(tag: str) -> ExpectationFunction:
    """Looks up a fundamental-trader expectation ``g`` by tag.

    :param tag: One of ``log``, ``linear``, ``tanh``.
    :raises UnknownFunction: If the tag is not in the catalog.
    """
    return _lookup(_G_CATALOG, tag, "g")


def ai_predictor(tag: str) -> ExpectationFunction:
    """Looks up an AI-trader predictor ``h`` by tag.

    :param tag: ``ar``, ``ar:<coef>`` or ``zero``.
    :raises UnknownFunction: If the tag is not in the catalog.
    """
    return _lookup(_H_CATALOG, tag, "h")


# the expectation and predictor of the reference experiment
g_log = LogExpectation()
h_ar = ARPredictor()
