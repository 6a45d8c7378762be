import pytest

from staircase.bch import build_bch
from staircase.blocks import StaircaseParams
from staircase.gf import build_field

# criterion number -> (passed, detail), filled by test_acceptance.py
ACCEPTANCE = {}


@pytest.fixture(scope="session")
def toy_t1():
    """[16, 11] extended Hamming code, q=4, t=1."""
    return build_bch(build_field(4), 1)


@pytest.fixture(scope="session")
def toy_t2():
    """[32, 21] extended BCH code, q=5, t=2."""
    return build_bch(build_field(5), 2)


@pytest.fixture(scope="session")
def toy_params(toy_t2):
    return StaircaseParams(toy_t2)


@pytest.fixture(scope="session")
def big_code():
    """[510, 491] component code of the m=255 staircase code."""
    return build_bch(build_field(9), 2, shorten=2)


@pytest.fixture(scope="session")
def big_params(big_code):
    return StaircaseParams(big_code)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
