from __future__ import annotations

import sys
from pathlib import Path

import pytest

from crnext.parser import parse_network

DATA = Path(__file__).parent / "data"
sys.path.insert(0, str(Path(__file__).parent))

FIXTURE_FILES = ["funnel", "ivanova_modified", "triangle", "chain", "feeder"]

# criterion lines collected by test_acceptance, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def load(name):
    return parse_network((DATA / f"{name}.crn").read_text())


@pytest.fixture
def funnel():
    return load("funnel")[0]


@pytest.fixture
def ivanova():
    return load("ivanova_modified")[0]


@pytest.fixture
def triangle():
    return load("triangle")[0]


@pytest.fixture
def chain():
    return load("chain")[0]


@pytest.fixture
def feeder():
    return load("feeder")[0]


@pytest.fixture
def a_to_b():
    return parse_network("A -> B ; k = 1")[0]


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
