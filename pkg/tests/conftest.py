import math

import numpy as np
import pytest

from group_sampler.models import SpectralState, Spectrum, random_spectral_state


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def battery():
    gen = np.random.default_rng(7)
    return [random_spectral_state(gen, 8, math.pi, include_edge=(i % 2 == 0)) for i in range(6)]


def eigenvector(lam, c=1.0):
    return SpectralState(Spectrum([lam]), [c])


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
