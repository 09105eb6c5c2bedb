import numpy as np
import pytest

from erm_spectra import VectorFamily, sample_data_matrix


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def gaussian_data(rng):
    return sample_data_matrix(VectorFamily("gaussian", 40), 30, rng)


@pytest.fixture
def sphere_data(rng):
    return sample_data_matrix(VectorFamily("uniform_sphere", 40), 30, rng)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance") or __import__("sys").modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[num])
