import numpy as np
import pytest

from nnlowrank import derive_rng, hilbert_tensor


@pytest.fixture(scope="session")
def hilbert_16():
    return hilbert_tensor((16, 16, 16))


@pytest.fixture(scope="session")
def hilbert_32():
    return hilbert_tensor((32, 32, 32))


@pytest.fixture()
def rng():
    return derive_rng(1234, "tests", 0)


def random_tensor(shape, seed=0):
    return derive_rng(seed, "tests_tensor", 0).standard_normal(shape)
