import sys

import numpy as np
import pytest

from rareclass import kernels
from rareclass.data import Dataset, SynthSpec, default_coefficients, synth_generate


@pytest.fixture(params=kernels.available())
def backend(request):
    return request.param


@pytest.fixture(scope="session")
def learnable():
    """n=2000, p=10, 5% label noise: the forest benchmark dataset."""
    return synth_generate(SynthSpec(2000, 10, default_coefficients(10, 3.0), 0.3, 0.05, seed=1))


def make_dataset(X, y, names=None):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    names = names or tuple(f"f{j}" for j in range(X.shape[1]))
    return Dataset(X, np.asarray(y), names)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.RESULTS):
        terminalreporter.write_line(line)
