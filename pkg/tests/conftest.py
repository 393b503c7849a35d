import pytest

from mzsim import reference_config
from mzsim.interferometer import pipeline

_REPORT = []


@pytest.fixture(scope="session")
def cfg():
    return reference_config()


@pytest.fixture(scope="session")
def ifm(cfg):
    return pipeline(cfg)


@pytest.fixture
def report():
    """Record one PASS/FAIL line for the terminal summary."""

    def add(name, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} {name}: {detail}"
        print(line)
        _REPORT.append(line)
        return ok

    return add


def pytest_terminal_summary(terminalreporter):
    if _REPORT:
        terminalreporter.section("acceptance criteria")
        for line in _REPORT:
            terminalreporter.write_line(line)
