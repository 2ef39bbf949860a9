import re

import pytest
from hypothesis import settings

# fixed example sequence so that every run checks the same cases
settings.register_profile("repro", derandomize=True, deadline=None)
settings.load_profile("repro")

CRITERIA = pytest.StashKey()


def pytest_configure(config):
    config.stash[CRITERIA] = {}


@pytest.fixture
def criterion(request):
    """Record a PASS/FAIL line for the criterion named in the test, then assert.

    Tests are named ``test_cNN_...``; a test that errors before recording a
    verdict is reported as FAIL.
    """
    verdicts = request.config.stash[CRITERIA]
    number = int(re.match(r"test_c(\d+)_", request.node.name).group(1))

    def record(ok, detail):
        verdicts[number] = (bool(ok), detail)
        assert ok, f"criterion {number}: {detail}"

    yield record
    verdicts.setdefault(number, (False, "raised before reaching a verdict"))


def pytest_terminal_summary(terminalreporter, config):
    verdicts = config.stash.get(CRITERIA, {})
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(verdicts):
        ok, detail = verdicts[number]
        terminalreporter.write_line(
            f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
