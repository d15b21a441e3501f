from .functions import (
    ExpectationFunction,
    ai_predictor,
    fundamental_expectation,
    g_log,
    h_ar,
)
from .utility import UtilityValue, ai_utility, fundamental_utility

__all__ = [
    "ExpectationFunction",
    "UtilityValue",
    "ai_predictor",
    "ai_utility",
    "fundamental_expectation",
    "fundamental_utility",
    "g_log",
    "h_ar",
]
