import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=400)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# acceptance criterion -> (passed, detail); filled by tests/test_acceptance.py
AC_RESULTS: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def ac_record():
    def record(name: str, passed: bool, detail: str):
        AC_RESULTS[name] = (bool(passed), detail)
    return record


def pytest_terminal_summary(terminalreporter):
    if not AC_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(AC_RESULTS, key=lambda s: int(s[2:])):
        passed, detail = AC_RESULTS[name]
        terminalreporter.write_line(f"{name} {'PASS' if passed else 'FAIL'}  {detail}")
