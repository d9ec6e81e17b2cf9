import pytest
from hypothesis import settings

from acceptance_log import RESULTS

# reproducible example streams; no example database between runs
settings.register_profile("repro", derandomize=True, database=None)
settings.load_profile("repro")


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(RESULTS):
        status, detail = RESULTS[k]
        terminalreporter.write_line(f"criterion {k:2d}: {status}  {detail}")


@pytest.fixture
def rng():
    import numpy as np
    return np.random.default_rng(2024)
