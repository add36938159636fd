import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_knots(rng, n, lo=0.0, hi=1.0, min_gap=1e-3):
    """Sorted uniform knots with a floor on the spacing."""
    while True:
        x = np.sort(rng.uniform(lo, hi, n))
        if n < 2 or np.min(np.diff(x)) >= min_gap * (hi - lo) / n:
            return x


def pytest_terminal_summary(terminalreporter):
    verdicts = sys.modules.get("test_acceptance")
    if verdicts is None or not verdicts.VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(verdicts.VERDICTS):
        terminalreporter.write_line(verdicts.VERDICTS[n])
