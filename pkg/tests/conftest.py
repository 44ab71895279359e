from fractions import Fraction

import pytest

from cubecover.certify import CertificateEntry
from cubecover.config import Box6, q_polytope
from cubecover.cover import verify_with_q

# a depth-2 leaf of the first starting box that the search resolves
LEAF = Box6.make([0] * 6, [Fraction(1, 40)] * 2 + [Fraction(1, 20)] * 4)
LEAF_TAU = (4, 6, 8, 2, 0, 1)


@pytest.fixture(scope="session")
def leaf_q():
    return q_polytope(LEAF)


@pytest.fixture(scope="session")
def leaf_entry(leaf_q):
    v = verify_with_q(LEAF, LEAF_TAU, leaf_q)
    assert v.feasible
    return CertificateEntry(LEAF, LEAF_TAU, v.witness.values)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("tests.test_acceptance") or sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
