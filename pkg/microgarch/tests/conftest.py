import numpy as np
import pytest

from microgarch.params import MicroParams


@pytest.fixture()
def reference() -> MicroParams:
    return MicroParams.reference()


@pytest.fixture()
def noise_only(reference: MicroParams) -> MicroParams:
    return reference.replace(p1=0.0, p2=0.0)


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(20240601))
