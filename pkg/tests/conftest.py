import numpy as np
import pytest

from factories import small_spec
from hirenet.interview_data.generator import generate_corpus
from hirenet.interview_data.interview_models import GeneratorSpec


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow training experiments")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope="session")
def spec() -> GeneratorSpec:
    return small_spec()


@pytest.fixture(scope="session")
def corpus(spec):
    return generate_corpus(spec)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
