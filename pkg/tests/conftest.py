import numpy as np
import pytest

from pseudologit.model import PAPER_PARAMS
from pseudologit.rng import RandomStream
from pseudologit.simulation import sample_dataset

# Filled by test_acceptance.py; printed at the end of the session.
ACCEPTANCE_LINES: dict[str, str] = {}


def ks_distance(values, cdf) -> float:
    """Two-sided Kolmogorov-Smirnov statistic of ``values`` against ``cdf``."""
    x = np.sort(np.asarray(values, dtype=float))
    n = x.size
    F = np.asarray(cdf(x), dtype=float)
    upper = np.arange(1, n + 1) / n - F
    lower = F - np.arange(0, n) / n
    return float(max(upper.max(), lower.max()))


class FixedStream:
    """Stand-in stream that replays a fixed list of uniforms."""

    def __init__(self, values):
        self.values = list(values)

    def uniforms(self, size):
        out, self.values = self.values[:size], self.values[size:]
        return np.array(out, dtype=float)

    def uniform(self):
        return float(self.uniforms(1)[0])


@pytest.fixture
def paper_sample_500():
    return sample_dataset(PAPER_PARAMS, 500, RandomStream(20240501))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: int(k)):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
