import math

import numpy as np
import pytest

from microgarch import exc
from microgarch.stats import lemma
from microgarch.stats.lemma import verify_lemma_risk_monotonicity

SIGMAS = np.linspace(0.1, 1.5, 15).tolist()


def test_exponential_matches_closed_form():
    report = verify_lemma_risk_monotonicity("exponential", 0.3, SIGMAS)
    assert report.closed_form is not None
    assert report.max_closed_form_error < 1e-6
    assert report.expected[0] == pytest.approx(-math.exp(-0.3 + 0.5 * 0.01))
    assert report.monotone
    assert report.verdict == "monotone decreasing"


def test_qmc_is_close_to_closed_form():
    report = verify_lemma_risk_monotonicity(
        "exponential:0.5", 0.0, SIGMAS, method="qmc", draws=8192, seed=3
    )
    assert report.method == "qmc"
    assert report.max_closed_form_error < 5e-3
    assert report.monotone


@pytest.mark.parametrize("method", ["quadrature", "qmc"])
@pytest.mark.parametrize(
    "tag", ["log", "log:5", "exponential", "exponential:2", "power", "power:0.5"]
)
def test_concave_utilities_are_monotone(rng: np.random.Generator, tag: str, method):
    for _ in range(5):
        mu = float(rng.uniform(-1.0, 1.0))
        sigmas = np.sort(rng.uniform(0.05, 0.3, size=8)).tolist()
        report = verify_lemma_risk_monotonicity(tag, mu, sigmas, method=method)
        assert report.monotone, (tag, mu, report.expected)


def test_single_sigma():
    report = verify_lemma_risk_monotonicity("log", 0.0, [0.5])
    assert report.monotone
    assert len(report.expected) == 1
    assert report.closed_form is None
    assert report.max_closed_form_error is None


def test_linear_is_refused():
    with pytest.raises(exc.NotConcave) as e:
        verify_lemma_risk_monotonicity("linear", 0.0, SIGMAS)
    assert e.value.exit_code == 3


@pytest.mark.parametrize("tag", ["cubic", "log:abc", "exponential:-1", "power:1"])
def test_unknown_utility(tag: str):
    with pytest.raises(exc.UnknownFunction) as e:
        verify_lemma_risk_monotonicity(tag, 0.0, SIGMAS)
    assert e.value.kind == "utility"


def test_leaving_the_domain():
    with pytest.raises(exc.UtilityDomainError) as e:
        verify_lemma_risk_monotonicity("log", 0.0, [1.0, 3.0])
    assert e.value.sigma == 3.0
    assert e.value.exit_code == 5


@pytest.mark.parametrize(
    "sigmas", [[], [0.0, 0.5], [-0.1, 0.5], [0.5, 0.4], [0.5, 0.5]]
)
def test_bad_grid(sigmas: list):
    with pytest.raises(exc.InvalidParameter) as e:
        verify_lemma_risk_monotonicity("log", 0.0, sigmas)
    assert e.value.name == "sigmas"


def test_bad_method():
    with pytest.raises(exc.InvalidParameter) as e:
        verify_lemma_risk_monotonicity("log", 0.0, SIGMAS, method="simpson")
    assert e.value.name == "method"


@pytest.mark.parametrize(
    "tag, cls, field, value, canonical",
    [
        ("log", lemma.LogUtility, "shift", lemma.DEFAULT_LOG_SHIFT, "log"),
        ("log:5", lemma.LogUtility, "shift", 5.0, "log:5.0"),
        ("exponential:2", lemma.ExponentialUtility, "a", 2.0, "exponential:2.0"),
        ("exponential:1", lemma.ExponentialUtility, "a", 1.0, "exponential"),
        ("power:3", lemma.PowerUtility, "eta", 3.0, "power:3.0"),
    ],
)
def test_utility_tags(tag: str, cls: type, field: str, value: float, canonical: str):
    u = lemma.utility(tag)
    assert isinstance(u, cls)
    assert getattr(u, field) == value
    assert u.tag == canonical


def test_catalog():
    assert lemma.catalog() == ["log", "exponential", "power", "linear"]


def test_not_monotone_report():
    report = lemma.LemmaReport(
        utility="log",
        mu=0.0,
        sigmas=(0.1, 0.2),
        expected=(1.0, 1.0 + 1e-6),
        method="quadrature",
        tolerance=1e-12,
    )
    assert not report.monotone
    assert report.verdict == "not monotone"
