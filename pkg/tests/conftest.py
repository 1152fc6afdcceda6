import os

import pytest

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion():
    """Record one acceptance criterion: ``criterion(name, ok, detail)``."""

    def record(name, ok, detail=""):
        _ACCEPTANCE.append((name, bool(ok), detail))
        return ok

    return record


def pytest_collection_modifyitems(config, items):
    if os.environ.get("CHACHAROT_SLOW"):
        return
    skip = pytest.mark.skip(reason="set CHACHAROT_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}".rstrip())
