import pytest

from charsums.characters import enumerate_characters, legendre_character
from charsums.sums import build_prefix

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def legendre7():
    return legendre_character(7)


@pytest.fixture(scope="session")
def table7(legendre7):
    return build_prefix(legendre7)


@pytest.fixture(scope="session")
def group7():
    return enumerate_characters(7)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
