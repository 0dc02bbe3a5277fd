import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from phaseamp import ObjectiveTable

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def pytest_collection_modifyitems(config, items):
    if os.environ.get("PHASEAMP_EXTENDED") == "1":
        return
    skip = pytest.mark.skip(reason="extended run; set PHASEAMP_EXTENDED=1")
    for item in items:
        if "extended" in item.keywords:
            item.add_marker(skip)


def binary_table(n: int, marked: int = 1, height: float = 1.0) -> ObjectiveTable:
    values = np.zeros(n)
    values[n - marked:] = height
    return ObjectiveTable.from_values(values, {"source": "binary", "n_states": n, "marked": marked})


@pytest.fixture
def make_binary():
    return binary_table


@pytest.fixture
def quad16():
    from phaseamp import InjectiveSpec, make_injective

    return make_injective(InjectiveSpec("quadratic", 16))


_CRITERIA = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """Record one acceptance line: criterion(number, passed, detail)."""
    lines = request.config.stash.setdefault(_CRITERIA, {})

    def record(number: int, passed: bool, detail: str) -> bool:
        lines[number] = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_CRITERIA, {})
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(lines):
        terminalreporter.write_line(lines[number])
