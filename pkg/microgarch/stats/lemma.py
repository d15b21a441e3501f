"""Numerical check that a risk-averse trader's expected utility falls as the return
distribution widens: for strictly increasing, strictly concave ``U``, the expectation
``E[U(mu + sigma eps)]`` with ``eps ~ N(0, 1)`` is decreasing in ``sigma``."""
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
import structlog
from numpy.polynomial import hermite_e
from scipy import stats
from scipy.stats import qmc

from microgarch import exc

LOG = structlog.get_logger(__name__)

QUADRATURE_NODES = 32
QMC_DRAWS = 4096
# rounding slack when comparing neighbouring expectations
MONOTONE_TOLERANCE = 1e-12

DEFAULT_LOG_SHIFT = 20.0
DEFAULT_RISK_AVERSION = 1.0
DEFAULT_POWER_ETA = 2.0


class Utility(ABC):
    """A utility of the return. ``lower_bound`` is the infimum of its domain; the
    utility is only defined strictly above it."""

    tag: str = ""
    strictly_concave: bool = True
    lower_bound: float = -math.inf

    @abstractmethod
    def __call__(self, r: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def closed_form(self, mu: float, sigma: float) -> Optional[float]:
        """``E[U(mu + sigma eps)]`` in closed form, if there is one."""
        return None

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.tag!r})"


class LogUtility(Utility):
    """``log(shift + r)``"""

    def __init__(self, shift: float = DEFAULT_LOG_SHIFT):
        self.shift = shift
        self.lower_bound = -shift
        self.tag = "log" if shift == DEFAULT_LOG_SHIFT else f"log:{shift!r}"

    def __call__(self, r: np.ndarray) -> np.ndarray:
        return np.log(self.shift + r)


class ExponentialUtility(Utility):
    """Constant absolute risk aversion, ``-exp(-a r)``."""

    def __init__(self, a: float = DEFAULT_RISK_AVERSION):
        if not a > 0:
            raise ValueError("risk aversion must be > 0")
        self.a = a
        self.tag = (
            "exponential" if a == DEFAULT_RISK_AVERSION else f"exponential:{a!r}"
        )

    def __call__(self, r: np.ndarray) -> np.ndarray:
        return -np.exp(-self.a * r)

    def closed_form(self, mu: float, sigma: float) -> Optional[float]:
        return -math.exp(-self.a * mu + 0.5 * (self.a * sigma) ** 2)


class PowerUtility(Utility):
    """Constant relative risk aversion, ``(shift + r)^(1 - eta) / (1 - eta)``."""

    def __init__(
        self, eta: float = DEFAULT_POWER_ETA, shift: float = DEFAULT_LOG_SHIFT
    ):
        if not eta > 0 or eta == 1:
            raise ValueError("eta must be > 0 and != 1")
        self.eta = eta
        self.shift = shift
        self.lower_bound = -shift
        self.tag = "power" if eta == DEFAULT_POWER_ETA else f"power:{eta!r}"

    def __call__(self, r: np.ndarray) -> np.ndarray:
        return np.power(self.shift + r, 1.0 - self.eta) / (1.0 - self.eta)


class LinearUtility(Utility):
    """Risk neutral. Not strictly concave, so the check refuses it."""

    tag = "linear"
    strictly_concave = False

    def __call__(self, r: np.ndarray) -> np.ndarray:
        return np.asarray(r, dtype=float)


def _with_arg(cls: type[Utility]) -> Callable[[Optional[str]], Utility]:
    def factory(arg: Optional[str]) -> Utility:
        return cls() if arg is None else cls(float(arg))  # type: ignore[call-arg]

    return factory


_CATALOG: dict[str, Callable[[Optional[str]], Utility]] = {
    "log": _with_arg(LogUtility),
    "exponential": _with_arg(ExponentialUtility),
    "power": _with_arg(PowerUtility),
    "linear": lambda _: LinearUtility(),
}


def utility(tag: str) -> Utility:
    """Looks up a utility by tag: ``log``, ``exponential``, ``power`` or ``linear``,
    each optionally followed by ``:<arg>`` (the shift, ``a`` or ``eta``).

    :raises UnknownFunction: If the tag is not in the catalog.
    """
    name, _, arg = tag.partition(":")
    unknown = exc.UnknownFunction(tag=tag, kind="utility", known=list(_CATALOG))
    try:
        factory = _CATALOG[name]
    except KeyError:
        raise unknown
    try:
        return factory(arg or None)
    except ValueError as e:
        raise unknown from e


def catalog() -> list[str]:
    return list(_CATALOG)


def _quadrature(nodes: int) -> tuple[np.ndarray, np.ndarray]:
    # probabilists' Hermite: weights integrate against exp(-z^2 / 2)
    z, w = hermite_e.hermegauss(nodes)
    return z, w / math.sqrt(2.0 * math.pi)


def _antithetic_sobol(draws: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    half = max(1, draws // 2)
    sampler = qmc.Sobol(d=1, scramble=True, seed=seed)
    u = sampler.random(half)[:, 0]
    u = np.clip(u, 1e-12, 1.0 - 1e-12)
    z = stats.norm.ppf(u)
    z = np.concatenate([z, -z])
    return z, np.full(len(z), 1.0 / len(z))


@dataclass(frozen=True)
class LemmaReport:
    """Expected utilities along a grid of standard deviations.

    :param utility: The utility tag.
    :param mu: The mean of the return.
    :param sigmas: The standard deviations, increasing.
    :param expected: ``E[U(mu + sigma eps)]`` at each sigma.
    :param method: ``quadrature`` or ``qmc``.
    :param tolerance: Increases up to this size count as estimation error.
    :param closed_form: The exact expectations, when the utility has a closed form.
    """

    utility: str
    mu: float
    sigmas: tuple[float, ...]
    expected: tuple[float, ...]
    method: str
    tolerance: float
    closed_form: Optional[tuple[float, ...]] = None

    @property
    def monotone(self) -> bool:
        """Whether the expectations are non-increasing in sigma, up to the tolerance."""
        return all(
            later - earlier <= self.tolerance
            for earlier, later in zip(self.expected, self.expected[1:])
        )

    @property
    def max_closed_form_error(self) -> Optional[float]:
        if self.closed_form is None:
            return None
        return max(abs(e - c) for e, c in zip(self.expected, self.closed_form))

    @property
    def verdict(self) -> str:
        return "monotone decreasing" if self.monotone else "not monotone"


def verify_lemma_risk_monotonicity(
    utility_tag: str,
    mu: float,
    sigmas: Sequence[float],
    *,
    method: str = "quadrature",
    nodes: int = QUADRATURE_NODES,
    draws: int = QMC_DRAWS,
    seed: int = 0,
) -> LemmaReport:
    """Estimate ``E[U(mu + sigma eps)]`` along ``sigmas`` and check that it does not
    increase.

    Gauss-Hermite quadrature is deterministic. The ``qmc`` method uses scrambled Sobol
    points mirrored around zero and the same points for every sigma, which keeps each
    mirrored pair's contribution non-increasing in sigma for a concave utility.

    :param utility_tag: A catalog tag, see :func:`utility`.
    :param mu: Mean of the return.
    :param sigmas: Strictly increasing positive standard deviations.
    :param method: ``quadrature`` or ``qmc``.
    :param nodes: Quadrature nodes.
    :param draws: QMC points, half of them mirrored.
    :param seed: Scrambling seed of the QMC points.
    :raises UnknownFunction: If the tag is not in the catalog.
    :raises NotConcave: If the utility is not strictly concave.
    :raises UtilityDomainError: If an evaluation point leaves the utility's domain.
    :raises InvalidParameter: If the sigma grid or the method is invalid.
    """
    u = utility(utility_tag)
    if not u.strictly_concave:
        raise exc.NotConcave(utility=utility_tag)

    grid = [float(s) for s in sigmas]
    if not grid:
        raise exc.InvalidParameter(name="sigmas", value=grid, reason="is empty")
    if grid[0] <= 0 or any(b <= a for a, b in zip(grid, grid[1:])):
        raise exc.InvalidParameter(
            name="sigmas", value=grid, reason="must be positive and strictly increasing"
        )

    if method == "quadrature":
        z, w = _quadrature(nodes)
    elif method == "qmc":
        z, w = _antithetic_sobol(draws, seed)
    else:
        raise exc.InvalidParameter(
            name="method", value=method, reason="must be `quadrature` or `qmc`"
        )

    log = LOG.bind(utility=utility_tag, mu=mu, method=method)
    log.info("Verifying risk monotonicity", points=len(z), sigmas=len(grid))

    expected = []
    for sigma in grid:
        r = mu + sigma * z
        if np.any(r <= u.lower_bound):
            raise exc.UtilityDomainError(utility=utility_tag, mu=mu, sigma=sigma)
        expected.append(float(np.dot(w, u(r))))

    scale = max(1.0, max(abs(e) for e in expected))
    closed = [u.closed_form(mu, s) for s in grid]
    report = LemmaReport(
        utility=u.tag,
        mu=mu,
        sigmas=tuple(grid),
        expected=tuple(expected),
        method=method,
        tolerance=MONOTONE_TOLERANCE * scale,
        closed_form=None if closed[0] is None else tuple(closed),  # type: ignore
    )
    log.info("Risk monotonicity checked", verdict=report.verdict)
    return report
