from fractions import Fraction
from pathlib import Path

import pytest

from crnelim.netparse import read_network

NETWORKS = Path(__file__).resolve().parent.parent / "networks"


def load(name: str):
    return read_network(NETWORKS / f"{name}.crn")


@pytest.fixture(scope="session")
def exp1():
    return load("exp1").network


@pytest.fixture(scope="session")
def enzyme():
    return load("enzyme").network


@pytest.fixture(scope="session")
def enzyme_unit():
    return load("enzyme_unit").network


@pytest.fixture(scope="session")
def enzyme_rev():
    return load("enzyme_rev").network


@pytest.fixture(scope="session")
def exp_count():
    return load("exp_count").network


def exp1_weight(x):
    """Unnormalized product-form weight 6^a 2^b 3^u / (a! b! u!)."""
    from math import factorial

    a, b, u = x
    return Fraction(6**a * 2**b * 3**u, factorial(a) * factorial(b) * factorial(u))


def exp_count_pi(x):
    a, u = x
    if a < 0 or u < 0 or (a, u) == (0, 0):
        return Fraction(0)
    return Fraction(1, 3 * 2 ** (a + u))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
