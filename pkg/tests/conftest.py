"""Shared pytest wiring.

test_acceptance.py tags each test with ``@pytest.mark.acceptance("<name>")``;
after the run, one PASS/FAIL line per criterion is printed so the gate can be
read off the terminal without scrolling through the full log.
"""

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repeatable",
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repeatable")


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(name): tags a test as one acceptance criterion"
    )


def pytest_runtest_setup(item):
    mark = item.get_closest_marker("acceptance")
    if mark is not None:
        item.user_properties.append(("acceptance", mark.args[0]))


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome, verdict in (("passed", "PASS"), ("failed", "FAIL"), ("error", "FAIL")):
        for rep in terminalreporter.stats.get(outcome, []):
            for key, val in getattr(rep, "user_properties", []):
                if key == "acceptance":
                    lines.append((val, verdict))
    if lines:
        terminalreporter.section("acceptance criteria")
        for name, verdict in sorted(set(lines)):
            terminalreporter.write_line(f"ACCEPTANCE: {name}: {verdict}")
