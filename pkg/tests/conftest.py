import os

import pytest
from hypothesis import HealthCheck, settings

from troprank.formats import EXAMPLES

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def B():
    return EXAMPLES["B"].matrix


@pytest.fixture(scope="session")
def D():
    return EXAMPLES["D"].matrix


# -- acceptance summary -------------------------------------------------------

ACCEPTANCE: dict = {}


@pytest.fixture(scope="session")
def acceptance():
    def record(number, title, ok, seconds, detail=""):
        status = "PASS" if ok else "FAIL"
        ACCEPTANCE[number] = f"criterion {number}: {status}  {title}  [{seconds:.2f}s] {detail}".rstrip()
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])
