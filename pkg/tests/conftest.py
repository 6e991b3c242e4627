import os
import sys

from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ACCEPTANCE_LINES: dict[int, str] = {}
_ran_acceptance = []


def pytest_collection_modifyitems(items):
    _ran_acceptance[:] = [any(item.module.__name__ == "test_acceptance" for item in items)]


def pytest_terminal_summary(terminalreporter):
    if not (_ran_acceptance and _ran_acceptance[0]):
        return
    from test_acceptance import CRITERIA

    terminalreporter.section("acceptance criteria")
    for num, name in CRITERIA.items():
        terminalreporter.write_line(ACCEPTANCE_LINES.get(num, f"FAIL  {num:2d}. {name} (did not complete)"))
