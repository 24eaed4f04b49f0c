import sys

import pytest

from converterless import CellParams, PvAnchors, calibrate


@pytest.fixture(scope="session")
def anchors():
    return PvAnchors()


@pytest.fixture(scope="session")
def pv(anchors):
    return calibrate(anchors)


@pytest.fixture(scope="session")
def cell():
    return CellParams()


def pytest_terminal_summary(terminalreporter):
    test_acceptance = next((m for name, m in list(sys.modules.items())
                            if name.rsplit(".", 1)[-1] == "test_acceptance"), None)
    if test_acceptance is None:
        return
    if not test_acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in test_acceptance.RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
