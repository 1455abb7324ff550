from __future__ import annotations

import pytest

from ksmooth import numeric as nm
from ksmooth import spaces as sp
from ksmooth.numeric import QSqrt2
from ksmooth.operators import Operator
from ksmooth.problem import load_json, problem_from_json, space_from_json
from ksmooth.verify import fixture_dir

R = QSqrt2(0, 1) / 2  # 1/sqrt2


def q(*xs) -> tuple:
    return tuple(nm.exact(x) for x in xs)


def regular_octagon() -> sp.Space:
    return sp.polyhedral([q(1, 0), (R, R), q(0, 1), (-R, R)], name="regular-octagon")


def fixture_operator(name: str) -> Operator:
    doc = load_json(fixture_dir() / f"{name}.json")
    return problem_from_json(doc["problem"]).operator()


def fixture_space(name: str) -> sp.Space:
    doc = load_json(fixture_dir() / f"{name}.json")
    return space_from_json(doc["space"], name=doc["name"])


@pytest.fixture
def octagon():
    return regular_octagon()


@pytest.fixture
def irregular_octagon():
    return fixture_space("space_irregular_octagon")


# filled by test_acceptance.py, printed after the run
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
