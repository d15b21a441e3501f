"""Shipped defaults. The market values are the ones the reference experiment was run
with; everything else is a reproducible-run convention."""

# order imbalance, liquidity, trader ratios and risk aversions of the reference market
reference_market = {
    "rho": 4.0,
    "k": 0.4,
    "s_liquidity": 1.0,
    "p1": 0.2,
    "p2": 0.4,
    "lambda": 1.2,
    "gamma": 1.2,
    "g_fn": "log",
    "h_fn": "ar",
}

reference_simulation = {
    "length": 1000,
    "burn_in": 100,
    "seeds": [0],
    "workers": 1,
}

reference_stats = {
    "significance": 0.01,
    "lags": [1],
    "ljung_box_lags": 10,
}

reference_output = {
    "directory": ".",
}

DEFAULT_CONFIG = {
    "market": reference_market,
    "simulation": reference_simulation,
    "stats": reference_stats,
    "output": reference_output,
}

# parameters a sweep may vary
sweep_axes = {"p1", "p2", "lambda", "gamma", "rho", "k"}

# significance thresholds for the star annotations, strictest first
star_levels = ((0.01, "***"), (0.05, "**"), (0.1, "*"))

# guards for the stylized-facts battery
min_report_length = 30

# clamp of the log expectation: log(1 + max(floor, x))
log_expectation_floor = -0.99

# slope of the trained autoregressive predictor
ar_coefficient = 0.1

# environment variable naming the default config file
config_env_var = "MICROGARCH_CONFIG"
