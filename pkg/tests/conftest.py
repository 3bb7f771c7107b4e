import numpy as np
import pytest

from modereg.model import Dataset


@pytest.fixture
def line_data():
    """Small two-column dataset lying close to y = 1 + 2x."""
    rng = np.random.default_rng(5)
    x = rng.standard_normal(40)
    y = 1 + 2 * x + 0.3 * rng.standard_normal(40)
    return Dataset.from_arrays(y, x)


def intercept_only(y):
    y = np.asarray(y, dtype=float)
    return Dataset(y, np.ones((y.size, 1)), ("intercept",))


def mode_bin(x, width, offset):
    """Closed interval of the fullest histogram bin; bin edges sit at
    ``offset + k * width``."""
    x = np.asarray(x)
    k = np.floor((x - offset) / width).astype(np.int64)
    vals, counts = np.unique(k, return_counts=True)
    kmax = vals[np.argmax(counts)]
    return offset + kmax * width, offset + (kmax + 1) * width


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: acceptance criterion (slow)")


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for num in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[num])
