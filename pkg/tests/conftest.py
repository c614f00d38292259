import numpy as np
import pytest

from zenolab import ModelParams, oracle


@pytest.fixture(scope="session")
def unstable():
    return ModelParams.reference()


@pytest.fixture(scope="session")
def stable(unstable):
    return unstable.replace(E_A=-1.0, E_B=-1.0)


@pytest.fixture(scope="session")
def single(unstable):
    """Omega = 0: |A> decouples, |B> decays alone."""
    return unstable.replace(Omega=0.0)


@pytest.fixture(scope="session")
def unstable_oracle(unstable):
    dm = oracle.build(unstable, 4000)
    return dm, oracle.solve(dm, keep_vectors=True)


@pytest.fixture(scope="session")
def stable_oracle(stable):
    dm = oracle.build(stable, 4000)
    return dm, oracle.solve(dm)


@pytest.fixture(scope="session")
def single_oracle(single):
    dm = oracle.build(single, 4000)
    return dm, oracle.solve(dm)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
