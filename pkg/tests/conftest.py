from __future__ import annotations

from fractions import Fraction

import pytest

from wem import polytope as P
from wem.polytope import HalfSpaceDescription, validate


def _hrep(normals, offsets):
    return validate(HalfSpaceDescription(tuple(map(tuple, normals)), tuple(offsets)))


def build_suite():
    """The seven test polytopes, keyed by a short name."""
    return {
        "square": P.box([0, 0], [1, 1]),
        "box32": P.box([0, 0], [3, 2]),
        "T": P.simplex_like([2, 1], 2),
        "2T": P.simplex_like([2, 1], 4),
        "cube": P.box([0, 0, 0], [1, 1, 1]),
        "simplex3": P.simplex_like([1, 1, 1], 1),
        "Z2simplex3": P.simplex_like([2, 1, 1], 2),
    }


SUITE = build_suite()
QS = [Fraction(0), Fraction(1, 3), Fraction(1, 2), Fraction(1), Fraction(2)]


@pytest.fixture(scope="session")
def suite():
    return SUITE


@pytest.fixture(params=sorted(SUITE), scope="session")
def suite_polytope(request):
    return request.param, SUITE[request.param]


@pytest.fixture(scope="session")
def T():
    return SUITE["T"]


@pytest.fixture(scope="session")
def square():
    return SUITE["square"]


# -- acceptance report -----------------------------------------------------------------

ACCEPTANCE: dict = {}


@pytest.fixture
def acceptance():
    """Record one line per criterion: acceptance(n, ok, detail)."""
    def record(n: int, ok: bool, detail: str = ""):
        ACCEPTANCE[n] = (ok, detail)
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
