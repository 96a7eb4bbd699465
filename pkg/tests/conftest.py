import cmath
import math

import pytest


def close(a, b, tol):
    """Componentwise absolute closeness."""
    a, b = complex(a), complex(b)
    return abs(a.real - b.real) <= tol and abs(a.imag - b.imag) <= tol


@pytest.fixture
def rng():
    import random

    return random.Random(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.VERDICTS.values():
        terminalreporter.write_line(line)
