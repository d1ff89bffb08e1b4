from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import strategies as st

from homgrowth.engine import GeneratingSystem, PseudogroupSpec
from homgrowth.moebius import FULL, INF, GroupElement, arc, union

ROOT = Path(__file__).resolve().parents[1]
SCENARIOS = ROOT / "scenarios"

ROTATION = GroupElement(3, -4, 4, 3)
SANOV_A = GroupElement(1, 2, 0, 1)
SANOV_B = GroupElement(1, 0, 2, 1)
PARABOLIC = GroupElement(1, 1, 0, 1)
T1 = GroupElement(8, 0, 0, 1)
T2_BASE = GroupElement(3, -2, 1, 0)  # attracts 2, repels 1


@pytest.fixture
def rotation_spec():
    return PseudogroupSpec(GeneratingSystem([("r", ROTATION)]), FULL, arc(-1, 1))


@pytest.fixture
def sanov_spec():
    return PseudogroupSpec(GeneratingSystem([("a", SANOV_A), ("b", SANOV_B)]))


@pytest.fixture
def parabolic_spec():
    return PseudogroupSpec(GeneratingSystem([("p", PARABOLIC)]), FULL, arc(-1, 1))


@pytest.fixture
def free_semigroup_spec():
    U = union(arc(3, -3), arc(Fraction(3, 2), Fraction(5, 2)))
    V = union(arc(4, -4), arc(Fraction(7, 4), Fraction(9, 4)))
    return PseudogroupSpec(GeneratingSystem([("t1", T1), ("t2", T2_BASE ** 3)]), U, V)


# --- hypothesis strategies -------------------------------------------------

rationals = st.builds(Fraction, st.integers(-24, 24), st.integers(1, 6))
points = st.one_of(rationals, st.just(INF))


def _to_element(t):
    a, b, c, d = t
    det = a * d - b * c
    if det < 0:
        a, b, c, d = c, d, a, b  # swapping rows flips the sign of det
    elif det == 0:
        a, b, c, d = 1, b, 0, 1
    return GroupElement(a, b, c, d)


def group_elements(bound=6):
    entry = st.integers(-bound, bound)
    return st.tuples(entry, entry, entry, entry).map(_to_element)


@st.composite
def raw_arcs(draw):
    p = draw(points)
    q = draw(points.filter(lambda x: x != p))
    return (p, q)


arc_lists = st.lists(raw_arcs(), min_size=0, max_size=4)


# --- acceptance summary ----------------------------------------------------

_ACCEPTANCE: list = []


@pytest.fixture
def acceptance_report():
    def record(number, ok, detail=""):
        _ACCEPTANCE.append((number, ok, detail))
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(_ACCEPTANCE, key=lambda t: t[0]):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status}  {detail}")
