import math
from concurrent.futures import ProcessPoolExecutor
from collections import Counter
from dataclasses import dataclass, replace
from functools import partial
from typing import Any, Optional, Sequence

import numpy as np
import pandas as pd
import structlog

from microgarch import exc, presets
from microgarch.context import RunContext
from microgarch.garch import (
    GarchState,
    conditional_variance,
    micro_to_garch,
    representative_garch,
)
from microgarch.params import GarchParams, MicroParams
from microgarch.pricing import (
    conditional_mean,
    order_volumes,
    step_return_closed_form,
)
from microgarch.rng import ALGORITHM, SeededRNG
from microgarch.stats.report import (
    BatchSummary,
    evaluate_stylized_facts,
    summarize_batch,
)
from microgarch.traders.utility import ai_utility, fundamental_utility

LOG = structlog.get_logger(__name__)

#: the per-step diagnostic columns, in output order
COLUMNS = ["t", "x", "eps", "r", "u", "sigma", "buy", "sell", "cond_mean"]


@dataclass(frozen=True)
class MarketState:
    """What the traders know at ``t-1``.

    :param x_prev: The fundamental variable ``x_{t-1}``.
    :param u_prev: The residual ``u_{t-1}``, the AI traders' last prediction error.
    :param sigma_prev: The volatility ``sigma_{t-1}``.
    :param t: Steps taken so far, burn-in included.
    """

    x_prev: float
    u_prev: float
    sigma_prev: float
    t: int = 0

    def __post_init__(self) -> None:
        if not self.sigma_prev >= 0:
            raise exc.InvalidParameter(
                name="sigma_prev", value=self.sigma_prev, reason="must be >= 0"
            )

    @classmethod
    def initial(cls, params: MicroParams) -> "MarketState":
        """A state near stationarity: zero residual and the unconditional volatility
        of the representative GARCH. The fundamental variable is drawn by the first
        step."""
        sigma_0 = math.sqrt(representative_garch(params).unconditional_variance)
        return cls(x_prev=0.0, u_prev=0.0, sigma_prev=sigma_0, t=0)


class ReturnSeries:
    """A sequence of returns, simulated or read from a file, with the per-step
    diagnostics when they are known.

    :param returns: The returns.
    :param diagnostics: One row per return with the columns in :data:`COLUMNS`.
    :param seed: The seed that produced the series, if simulated.
    :param params: The market parameters, if simulated.
    :param burn_in: Steps simulated and discarded before the first kept return.
    :param negative_volume_steps: Kept steps where a side's order volume was negative.
    :param large_return_steps: Kept steps with ``|r| > 1``.
    """

    def __init__(
        self,
        *,
        returns: np.ndarray,
        diagnostics: Optional[pd.DataFrame] = None,
        seed: Optional[int] = None,
        params: Optional[MicroParams] = None,
        burn_in: int = 0,
        negative_volume_steps: int = 0,
        large_return_steps: int = 0,
    ):
        self.returns = np.asarray(returns, dtype=float)
        if diagnostics is not None and len(diagnostics) != len(self.returns):
            raise ValueError("diagnostics must have one row per return")
        self.diagnostics = diagnostics
        self.seed = seed
        self.params = params
        self.burn_in = burn_in
        self.negative_volume_steps = negative_volume_steps
        self.large_return_steps = large_return_steps
        self.rng_algorithm = ALGORITHM if seed is not None else None

    @property
    def length(self) -> int:
        return len(self.returns)

    def __len__(self) -> int:
        return self.length

    def __array__(self, dtype: Any = None, copy: Any = None) -> np.ndarray:
        return self.returns if dtype is None else self.returns.astype(dtype)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ReturnSeries):
            return NotImplemented
        same_diag = (self.diagnostics is None and other.diagnostics is None) or (
            self.diagnostics is not None
            and other.diagnostics is not None
            and self.diagnostics.equals(other.diagnostics)
        )
        return (
            self.seed == other.seed
            and self.params == other.params
            and self.burn_in == other.burn_in
            and np.array_equal(self.returns, other.returns)
            and same_diag
        )

    __hash__ = None  # type: ignore[assignment]

    def metadata(self) -> dict[str, Any]:
        """The run record written next to a trajectory."""
        meta: dict[str, Any] = {
            "length": self.length,
            "burn_in": self.burn_in,
            "negative_volume_steps": self.negative_volume_steps,
            "large_return_steps": self.large_return_steps,
        }
        if self.seed is not None:
            meta["seed"] = self.seed
            meta["rng"] = self.rng_algorithm
        if self.params is not None:
            meta["params"] = self.params.as_dict()
        return meta

    def __repr__(self) -> str:
        return f"ReturnSeries(length={self.length}, seed={self.seed!r})"


def _step(
    params: MicroParams,
    state: MarketState,
    eps: float,
    ctx: RunContext,
) -> tuple[tuple[float, ...], MarketState]:
    """One step of the market: utilities, orders, return, and the next state. ``state``
    is what the traders see, its ``x_prev`` already holds this step's draw."""
    x = state.x_prev
    u_fund = fundamental_utility(x, state.sigma_prev, params)
    u_ai = ai_utility(x, state.u_prev, params, state=state)
    vols = order_volumes(u_fund, u_ai, eps, params)
    r = step_return_closed_form(u_fund, u_ai, eps, params)
    mean = conditional_mean(u_fund, u_ai, params)
    u = r - mean

    garch = micro_to_garch(params, x, state.u_prev, state.sigma_prev, state=state)
    sigma = math.sqrt(
        conditional_variance(
            garch,
            GarchState(
                u_prev=state.u_prev,
                sigma2_prev=state.sigma_prev * state.sigma_prev,
            ),
        )
    )
    if not (math.isfinite(r) and math.isfinite(sigma)):
        raise exc.DivergedSimulation(step=state.t, ctx=ctx)

    record = (x, eps, r, u, sigma, vols.buy, vols.sell, mean)
    return record, MarketState(x_prev=x, u_prev=u, sigma_prev=sigma, t=state.t + 1)


def simulate(
    params: MicroParams,
    length: int,
    seed: int,
    *,
    burn_in: int = presets.reference_simulation["burn_in"],
) -> ReturnSeries:
    """Simulate the three-trader market.

    Every step draws the fundamental variable and the price shock independently from
    a standard normal, prices the step from the order imbalance, and advances the
    residual and the volatility so that the recorded volatility is the conditional
    standard deviation the micro-to-GARCH mapping gives for that step.

    :param params: The market parameters.
    :param length: Number of returns to keep.
    :param seed: Seed of the random generator.
    :param burn_in: Steps to simulate and discard first.
    :raises InvalidParameter: If ``length < 1`` or ``burn_in < 0``.
    :raises DivergedSimulation: If the recursion stops producing finite values.
    """
    ctx = RunContext(seed=seed, params=params.as_dict())
    if length < 1:
        raise exc.InvalidParameter(
            name="length", value=length, reason="must be >= 1", ctx=ctx
        )
    if burn_in < 0:
        raise exc.InvalidParameter(
            name="burn_in", value=burn_in, reason="must be >= 0", ctx=ctx
        )

    log = LOG.bind(seed=seed, length=length, burn_in=burn_in)
    log.info("Simulating return series")

    # column 0 is the fundamental variable, column 1 the price shock
    draws = SeededRNG(seed).standard_normal((burn_in + length, 2)).tolist()
    state = MarketState.initial(params)

    rows = np.empty((length, len(COLUMNS)))
    for i, (x, eps) in enumerate(draws):
        ctx.step = i
        record, state = _step(params, replace(state, x_prev=x), eps, ctx)
        if i >= burn_in:
            kept = i - burn_in
            rows[kept, 0] = kept + 1
            rows[kept, 1:] = record

    diagnostics = pd.DataFrame(rows, columns=COLUMNS)
    diagnostics["t"] = diagnostics["t"].astype(np.int64)
    returns = diagnostics["r"].to_numpy(copy=True)

    negative = int(((diagnostics["buy"] < 0) | (diagnostics["sell"] < 0)).sum())
    large = int((np.abs(returns) > 1).sum())
    log.info(
        "Simulation finished",
        negative_volume_steps=negative,
        large_return_steps=large,
    )

    return ReturnSeries(
        returns=returns,
        diagnostics=diagnostics,
        seed=seed,
        params=params,
        burn_in=burn_in,
        negative_volume_steps=negative,
        large_return_steps=large,
    )


def _check_seeds(seeds: Sequence[int]) -> None:
    if not seeds:
        raise exc.InvalidParameter(name="seeds", value=list(seeds), reason="is empty")
    dupes = sorted(seed for seed, n in Counter(seeds).items() if n > 1)
    if dupes:
        raise exc.DuplicateSeeds(seeds=dupes)


def simulate_batch(
    params: MicroParams,
    length: int,
    seeds: Sequence[int],
    *,
    burn_in: int = presets.reference_simulation["burn_in"],
    workers: int = 1,
) -> list[ReturnSeries]:
    """Run :func:`simulate` once per seed. Runs share nothing, so they may execute in
    separate processes; the result is always in the order of ``seeds``.

    :param params: The market parameters.
    :param length: Number of returns to keep per run.
    :param seeds: Distinct seeds, one run each.
    :param burn_in: Steps to discard per run.
    :param workers: Processes to use. 1 runs in-process.
    :raises DuplicateSeeds: If a seed repeats.
    """
    _check_seeds(seeds)
    log = LOG.bind(runs=len(seeds), length=length, workers=workers)
    log.info("Simulating batch")

    run = partial(simulate, params, length, burn_in=burn_in)
    if workers > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            batch = list(pool.map(run, seeds))
    else:
        batch = [run(seed) for seed in seeds]

    log.info("Batch finished")
    return batch


class SweepRow:
    """One value of a sweep: the representative GARCH constants and the stylized
    facts of a batch at that value.

    :param value: The value of the swept parameter.
    :param garch: The mapping at ``x = u = sigma = 0``.
    :param margin: The stationarity margin.
    :param summary: The batch summary of the stylized facts.
    """

    def __init__(
        self,
        *,
        value: float,
        garch: GarchParams,
        margin: float,
        summary: BatchSummary,
    ):
        self.value = value
        self.garch = garch
        self.margin = margin
        self.summary = summary

    def as_dict(self) -> dict[str, Any]:
        row = {
            "axis_value": self.value,
            "omega": self.garch.omega,
            "f": self.garch.f_value,
            "alpha": self.garch.alpha,
            "beta": self.garch.beta,
            "margin": self.margin,
        }
        row.update(self.summary.as_dict())
        return row


class SweepReport:
    """The result of :func:`sweep`: one row per value, in the order given."""

    def __init__(self, *, axis: str, rows: list[SweepRow], seeds: Sequence[int]):
        self.axis = axis
        self.rows = rows
        self.seeds = list(seeds)

    def column(self, name: str) -> list[float]:
        return [row.as_dict()[name] for row in self.rows]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([row.as_dict() for row in self.rows])


def sweep(
    base: MicroParams,
    axis: str,
    values: Sequence[float],
    length: int,
    seeds: Sequence[int],
    *,
    burn_in: int = presets.reference_simulation["burn_in"],
    significance: float = presets.reference_stats["significance"],
    workers: int = 1,
) -> SweepReport:
    """Vary one micro parameter and report how the implied GARCH constants and the
    simulated stylized facts respond.

    :param base: The parameters held fixed.
    :param axis: The parameter to vary: one of ``p1``, ``p2``, ``lambda``, ``gamma``,
        ``rho``, ``k``.
    :param values: The values to visit.
    :param length: Returns per run.
    :param seeds: Seeds of the batch run at every value.
    :param burn_in: Steps to discard per run.
    :param significance: Level of the stylized-fact verdicts.
    :param workers: Processes per batch.
    :raises InvalidParameter: If the axis is unknown, ``values`` is empty, or a value
        makes the parameters invalid.
    :raises NonStationaryParams: If a value makes the market non-stationary.
    """
    if axis not in presets.sweep_axes:
        raise exc.InvalidParameter(
            name="axis",
            value=axis,
            reason=f"must be one of {', '.join(sorted(presets.sweep_axes))}",
        )
    if not values:
        raise exc.InvalidParameter(name="values", value=[], reason="is empty")
    _check_seeds(seeds)

    # build every parameter set before simulating anything
    variants = [base.replace(**{axis: value}) for value in values]

    log = LOG.bind(axis=axis, values=list(values))
    log.info("Sweeping")

    rows = []
    for value, params in zip(values, variants):
        batch = simulate_batch(
            params, length, seeds, burn_in=burn_in, workers=workers
        )
        reports = [evaluate_stylized_facts(s, significance) for s in batch]
        rows.append(
            SweepRow(
                value=value,
                garch=representative_garch(params),
                margin=params.stationarity_margin,
                summary=summarize_batch(reports),
            )
        )
    return SweepReport(axis=axis, rows=rows, seeds=seeds)
