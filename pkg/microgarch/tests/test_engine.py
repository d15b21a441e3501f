import math

import numpy as np
import pytest

from microgarch import engine, exc
from microgarch.engine import (
    COLUMNS,
    MarketState,
    ReturnSeries,
    simulate,
    simulate_batch,
    sweep,
)
from microgarch.garch import GarchState, conditional_variance, micro_to_garch
from microgarch.params import MicroParams
from microgarch.stats.report import evaluate_stylized_facts, summarize_batch

from .utils import LaggedPredictor


def test_deterministic(reference: MicroParams):
    a = simulate(reference, 300, seed=42)
    b = simulate(reference, 300, seed=42)
    assert a == b
    assert np.array_equal(a.returns, b.returns)
    assert not np.array_equal(a.returns, simulate(reference, 300, seed=43).returns)


def test_trajectory_columns(reference: MicroParams):
    series = simulate(reference, 50, seed=0)
    diag = series.diagnostics
    assert list(diag.columns) == COLUMNS
    assert diag["t"].tolist() == list(range(1, 51))
    assert np.array_equal(diag["r"].to_numpy(), series.returns)
    assert len(series) == series.length == 50
    assert np.array_equal(np.asarray(series), series.returns)


def test_noise_only_is_iid_scaled_noise(noise_only: MicroParams):
    series = simulate(noise_only, 200, seed=7)
    diag = series.diagnostics
    assert (diag["cond_mean"] == 0).all()
    scale = noise_only.rho * noise_only.k
    assert diag["r"].tolist() == [scale * e for e in diag["eps"].tolist()]
    assert np.array_equal(diag["u"].to_numpy(), diag["r"].to_numpy())


def test_state_recursion(reference: MicroParams):
    """every recorded volatility is the one the mapping gives for the step before"""
    diag = simulate(reference, 300, seed=3).diagnostics
    rows = diag.to_dict("records")
    for prev, cur in zip(rows, rows[1:]):
        garch = micro_to_garch(reference, cur["x"], prev["u"], prev["sigma"])
        sigma2 = conditional_variance(
            garch,
            GarchState(u_prev=prev["u"], sigma2_prev=prev["sigma"] * prev["sigma"]),
        )
        assert cur["sigma"] == math.sqrt(sigma2)
        assert cur["u"] == cur["r"] - cur["cond_mean"]


def test_state_recursion_with_state_predictor():
    params = MicroParams.reference()
    object.__setattr__(params, "h", LaggedPredictor())
    rows = simulate(params, 200, seed=3, burn_in=0).diagnostics.to_dict("records")
    for prev, cur in zip(rows, rows[1:]):
        state = MarketState(x_prev=cur["x"], u_prev=prev["u"], sigma_prev=prev["sigma"])
        garch = micro_to_garch(params, cur["x"], prev["u"], prev["sigma"], state=state)
        sigma2 = conditional_variance(
            garch,
            GarchState(u_prev=prev["u"], sigma2_prev=prev["sigma"] * prev["sigma"]),
        )
        assert cur["sigma"] == math.sqrt(sigma2)
        assert cur["cond_mean"] == pytest.approx(garch.f_value, rel=1e-12, abs=1e-12)


def test_volatility_floor(reference: MicroParams):
    sigma = simulate(reference, 500, seed=9).diagnostics["sigma"].to_numpy()
    assert np.all(sigma**2 >= reference.noise_variance * (1 - 1e-12))


def test_burn_in_discards_leading_steps(reference: MicroParams):
    short = simulate(reference, 50, seed=5, burn_in=10)
    full = simulate(reference, 60, seed=5, burn_in=0)
    assert np.array_equal(short.returns, full.returns[10:])
    assert short.burn_in == 10


@pytest.mark.parametrize(
    "length, burn_in, name",
    [(0, 10, "length"), (-5, 10, "length"), (10, -1, "burn_in")],
)
def test_simulate_rejects(reference: MicroParams, length: int, burn_in: int, name: str):
    with pytest.raises(exc.InvalidParameter) as e:
        simulate(reference, length, seed=0, burn_in=burn_in)
    assert e.value.name == name
    assert e.value.ctx.seed == 0


def test_counters_match_trajectory(reference: MicroParams):
    series = simulate(reference, 1000, seed=1)
    diag = series.diagnostics
    negative = int(((diag["buy"] < 0) | (diag["sell"] < 0)).sum())
    assert series.negative_volume_steps == negative
    assert series.large_return_steps == int((diag["r"].abs() > 1).sum())

    meta = series.metadata()
    assert meta["seed"] == 1
    assert meta["rng"] == "numpy.PCG64"
    assert meta["length"] == 1000
    assert meta["burn_in"] == 100
    assert meta["params"] == reference.as_dict()
    assert meta["negative_volume_steps"] == negative


def test_plain_series_metadata():
    series = ReturnSeries(returns=np.arange(5.0))
    assert series.metadata() == {
        "length": 5,
        "burn_in": 0,
        "negative_volume_steps": 0,
        "large_return_steps": 0,
    }
    assert series.rng_algorithm is None
    assert series == ReturnSeries(returns=[0.0, 1.0, 2.0, 3.0, 4.0])


def test_market_state():
    with pytest.raises(exc.InvalidParameter):
        MarketState(x_prev=0.0, u_prev=0.0, sigma_prev=-1.0)


def test_initial_state(reference: MicroParams):
    state = MarketState.initial(reference)
    assert state.x_prev == state.u_prev == 0.0
    assert state.t == 0
    assert state.sigma_prev == pytest.approx(math.sqrt(2.56 / 0.26272), rel=1e-12)


def test_divergence(reference: MicroParams, monkeypatch):
    monkeypatch.setattr(engine, "conditional_variance", lambda *_: math.inf)
    with pytest.raises(exc.DivergedSimulation) as e:
        simulate(reference, 10, seed=4)
    assert e.value.step == 0
    assert e.value.ctx.seed == 4
    assert e.value.exit_code == 5


def test_batch_single_seed(reference: MicroParams):
    (series,) = simulate_batch(reference, 100, [8], burn_in=20)
    assert series == simulate(reference, 100, 8, burn_in=20)


def test_batch_keeps_seed_order(reference: MicroParams):
    seeds = [5, 3, 9, 1]
    batch = simulate_batch(reference, 100, seeds)
    assert [s.seed for s in batch] == seeds
    reverse = simulate_batch(reference, 100, seeds[::-1])
    assert batch == reverse[::-1]


def test_batch_duplicate_seeds(reference: MicroParams):
    with pytest.raises(exc.DuplicateSeeds) as e:
        simulate_batch(reference, 100, [1, 2, 1, 3, 2])
    assert e.value.seeds == [1, 2]


def test_batch_no_seeds(reference: MicroParams):
    with pytest.raises(exc.InvalidParameter) as e:
        simulate_batch(reference, 100, [])
    assert e.value.name == "seeds"


def test_batch_workers_match_in_process(reference: MicroParams):
    seeds = [0, 1, 2]
    in_process = simulate_batch(reference, 200, seeds)
    pooled = simulate_batch(reference, 200, seeds, workers=2)
    assert pooled == in_process


@pytest.fixture()
def liquid(reference: MicroParams) -> MicroParams:
    """noise variance 0.64, so the sweeps below stay stationary"""
    return reference.replace(k=0.2)


def test_sweep_ai_ratio_drives_alpha(liquid: MicroParams):
    report = sweep(liquid, "p2", [0.0, 0.2, 0.4, 0.6], 200, [1, 2])
    alphas = report.column("alpha")
    assert alphas[0] == 0.0
    assert all(b > a for a, b in zip(alphas, alphas[1:]))
    # beta only depends on the fundamental traders
    assert len(set(report.column("beta"))) == 1
    assert report.column("axis_value") == [0.0, 0.2, 0.4, 0.6]


def test_sweep_fundamental_ratio_drives_beta(liquid: MicroParams):
    report = sweep(liquid, "p1", [0.0, 0.2, 0.4], 200, [1, 2])
    betas = report.column("beta")
    assert betas[0] == 0.0
    assert all(b > a for a, b in zip(betas, betas[1:]))
    margins = report.column("margin")
    assert all(b < a for a, b in zip(margins, margins[1:]))


def test_sweep_lambda_alias(liquid: MicroParams):
    report = sweep(liquid, "lambda", [0.6, 1.2], 200, [1])
    assert report.column("beta")[1] == pytest.approx(4 * report.column("beta")[0])


def test_sweep_frame(liquid: MicroParams):
    frame = sweep(liquid, "gamma", [0.5, 1.0], 100, [4, 5]).to_frame()
    assert len(frame) == 2
    for column in ("axis_value", "omega", "alpha", "beta", "margin", "runs"):
        assert column in frame.columns
    assert "kurtosis_median" in frame.columns
    assert "sq_autocorr_pass_rate" in frame.columns
    assert (frame["runs"] == 2).all()


def test_sweep_rejects_non_stationary_value(reference: MicroParams):
    with pytest.raises(exc.NonStationaryParams):
        sweep(reference, "p2", [0.2, 0.6], 100, [1])


@pytest.mark.parametrize(
    "axis, values, name",
    [("s_liquidity", [1.0], "axis"), ("p2", [], "values")],
)
def test_sweep_rejects(liquid: MicroParams, axis: str, values: list, name: str):
    with pytest.raises(exc.InvalidParameter) as e:
        sweep(liquid, axis, values, 100, [1])
    assert e.value.name == name


def test_sweep_single_value_is_a_batch(reference: MicroParams):
    seeds = [11, 12, 13]
    report = sweep(reference, "p2", [0.4], 150, seeds)
    batch = simulate_batch(reference, 150, seeds)
    expected = summarize_batch([evaluate_stylized_facts(s) for s in batch])
    assert report.rows[0].summary == expected


@pytest.mark.slow
def test_noise_only_variance(noise_only: MicroParams):
    n = 100_000
    returns = simulate(noise_only, n, seed=21).returns
    var = noise_only.noise_variance
    se = var * math.sqrt(2.0 / n)
    assert returns.var() == pytest.approx(var, abs=3 * se)


@pytest.mark.slow
def test_noise_only_has_no_clustering(noise_only: MicroParams):
    batch = simulate_batch(noise_only, 1000, list(range(30)))
    reports = [evaluate_stylized_facts(s, 0.05) for s in batch]
    p_values = [r.clustering.p_value for r in reports]
    assert np.median(p_values) > 0.05
    assert np.median([r.ljung_box.p_value for r in reports]) > 0.05
