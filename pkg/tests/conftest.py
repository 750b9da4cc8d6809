import pytest

from cubicmoments.characters import FamilySpec
from cubicmoments.moments import LedgerStore, s_term_layers, sweep


@pytest.fixture(scope="session")
def cache_root(tmp_path_factory):
    return tmp_path_factory.mktemp("cache")


@pytest.fixture(scope="session")
def spec52():
    return FamilySpec(5, 2)


@pytest.fixture(scope="session")
def sweep52(spec52, cache_root):
    return sweep(spec52, store=LedgerStore(cache_root, spec52))


@pytest.fixture(scope="session")
def layers52(spec52):
    return s_term_layers(spec52)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
