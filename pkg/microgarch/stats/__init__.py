from microgarch.stats.moments import (
    kurtosis,
    ks_pvalue,
    ks_statistic,
    skewness,
    sq_autocorrelation,
)
from microgarch.stats.report import (
    BatchSummary,
    StylizedFactsReport,
    evaluate_stylized_facts,
    summarize_batch,
)

__all__ = [
    "BatchSummary",
    "StylizedFactsReport",
    "evaluate_stylized_facts",
    "kurtosis",
    "ks_pvalue",
    "ks_statistic",
    "skewness",
    "sq_autocorrelation",
    "summarize_batch",
]
