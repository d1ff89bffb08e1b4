import itertools
import random
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from homgrowth.engine import (
    BasePointOutsideU,
    GeneratingSystem,
    PseudogroupSpec,
    ResourceCapExceeded,
    cayley_ball,
    constrained_length,
    germ_ball,
    germ_distance,
    orbit_ball,
    stabilizer_elements,
)
from homgrowth.moebius import IDENTITY, INF, GroupElement, act, arc, compose, invert

from conftest import ROTATION, SANOV_A, SANOV_B, group_elements

F = Fraction


def _mul(m, n):
    # plain tuple product, independent of GroupElement
    a, b, c, d = m
    e, f, g, h = n
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def _projective_key(m):
    g = gcd(*m)
    m = tuple(x // g for x in m)
    lead = next(x for x in m if x)
    return m if lead > 0 else tuple(-x for x in m)


def reduced_word_ball(R):
    """Elements of <a, b> from reduced words of length <= R, keyed projectively."""
    gens = {"a": (1, 2, 0, 1), "A": (1, -2, 0, 1), "b": (1, 0, 2, 1), "B": (1, 0, -2, 1)}
    inverse = {"a": "A", "A": "a", "b": "B", "B": "b"}
    out = {}
    words = [""]
    for n in range(R + 1):
        for w in words:
            m = (1, 0, 0, 1)
            for ch in w:
                m = _mul(gens[ch], m)
            out.setdefault(_projective_key(m), n)
        words = [w + ch for w in words for ch in gens if not w or inverse[ch] != w[-1]]
    return out


def test_rotation_ball_is_Z(rotation_spec):
    ball = germ_ball(rotation_spec, F(0), 10)
    assert len(ball) == 21
    assert ball.cumulative() == [2 * r + 1 for r in range(11)]
    power = {0: (1, 0, 0, 1)}
    for m in range(1, 11):
        power[m] = _mul((3, -4, 4, 3), power[m - 1])
        power[-m] = _mul((3, 4, -4, 3), power[-m + 1])
    expected = {_projective_key(v): abs(m) for m, v in power.items()}
    assert {g.entries: n for g, (n, _) in ball.members.items()} == expected


def test_zero_radius(sanov_spec, rotation_spec):
    for spec in (sanov_spec, rotation_spec):
        ball = germ_ball(spec, F(0), 0)
        assert dict(ball.members) == {IDENTITY: (0, F(0))}
        assert ball.sphere_sizes == (1,)


def test_sanov_ball_matches_reduced_words(sanov_spec):
    ball = germ_ball(sanov_spec, F(0), 6)
    assert len(ball) == 2 * 3 ** 6 - 1 == 1457
    oracle = reduced_word_ball(6)
    assert len(oracle) == 1457
    assert {g.entries: n for g, (n, _) in ball.members.items()} == oracle


def test_members_record_points_and_witness_words(sanov_spec):
    ball = germ_ball(sanov_spec, F(1, 3), 4)
    for g, (n, p) in ball.members.items():
        assert act(g, F(1, 3)) == p
        word = ball.word(g)
        assert len(word) == n
        assert sanov_spec.S.product(word) == g
    assert sum(ball.sphere_sizes) == len(ball)


def test_orbit_ball_examples(parabolic_spec, rotation_spec):
    assert orbit_ball(parabolic_spec, INF, 5) == {INF: 0}
    assert len(germ_ball(parabolic_spec, INF, 5)) == 11
    assert orbit_ball(rotation_spec, F(0), 0) == {F(0): 0}
    orbit = orbit_ball(rotation_spec, F(0), 3)
    assert len(orbit) == 7
    assert sorted(orbit.values()) == [0, 1, 1, 2, 2, 3, 3]
    for m in range(-3, 4):
        assert orbit[act(ROTATION ** m, F(0))] == abs(m)


def test_germ_distance_examples(rotation_spec, sanov_spec):
    r = ROTATION
    assert germ_distance(rotation_spec, F(0), r, r) == 0
    assert germ_distance(sanov_spec, F(0), IDENTITY, SANOV_A) == 1
    assert germ_distance(rotation_spec, F(0), r ** 2, invert(r)) == 3


def test_stabilizer_examples(rotation_spec, parabolic_spec, sanov_spec):
    for R in (0, 3, 8):
        assert stabilizer_elements(rotation_spec, F(0), R) == set()
    assert stabilizer_elements(parabolic_spec, INF, 4) == {
        GroupElement(1, k, 0, 1) for k in (-4, -3, -2, -1, 1, 2, 3, 4)}
    # b = (1 0; 2 1) fixes 0, so the stabilizer of 0 holds its nonzero powers
    stab = stabilizer_elements(sanov_spec, F(0), 6)
    members = germ_ball(sanov_spec, F(0), 6).members
    brute = {g for g in members if not g.is_identity() and act(g, F(0)) == 0}
    assert stab == brute == {SANOV_B ** k for k in range(-6, 7) if k}


def test_errors(rotation_spec, sanov_spec):
    spec = PseudogroupSpec(rotation_spec.S, arc(0, 1))
    with pytest.raises(BasePointOutsideU):
        germ_ball(spec, F(2), 3)
    with pytest.raises(ResourceCapExceeded):
        germ_ball(sanov_spec, F(0), 10, max_nodes=500)
    with pytest.raises(ValueError):
        germ_distance(spec, F(1, 2), IDENTITY, ROTATION ** 5)


def test_unreachable_within_cap(rotation_spec):
    assert constrained_length(rotation_spec, F(0), ROTATION ** 9, max_radius=5) is None


def test_generating_system_completion():
    S = GeneratingSystem([("r", ROTATION)])
    assert S.labels == ("r", "r^-1")
    assert S.elements == (ROTATION, invert(ROTATION))
    J = GroupElement(0, -1, 1, 0)  # involution: its own inverse
    assert len(GeneratingSystem([("j", J)])) == 1
    with pytest.raises(ValueError):
        GeneratingSystem([("e", IDENTITY)])
    with pytest.raises(ValueError):
        GeneratingSystem([("r", ROTATION), ("s", ROTATION)])


def test_spec_rejects_V_touching_boundary():
    S = GeneratingSystem([("r", ROTATION)])
    with pytest.raises(ValueError):
        PseudogroupSpec(S, arc(0, 3), arc(0, 1))
    PseudogroupSpec(S, arc(0, 3), arc(F(1, 2), 1))


def test_threads_do_not_change_the_ball(sanov_spec):
    one = germ_ball(sanov_spec, F(0), 7)
    many = germ_ball(sanov_spec, F(0), 7, threads=8)
    assert list(one.members.items()) == list(many.members.items())


def _brute_force_word_lengths(S, R):
    lengths = {}
    for n in range(R + 1):
        for word in itertools.product(S.elements, repeat=n):
            g = IDENTITY
            for s in word:
                g = compose(s, g)
            lengths.setdefault(g, n)
    return lengths


@settings(max_examples=25, deadline=None)
@given(st.lists(group_elements(4), min_size=1, max_size=2, unique=True))
def test_full_U_agrees_with_cayley_ball(gens):
    gens = [g for g in gens if not g.is_identity()]
    if not gens or len({g for g in gens} | {invert(g) for g in gens}) < len(gens):
        return
    try:
        S = GeneratingSystem([(f"g{i}", g) for i, g in enumerate(gens)])
    except ValueError:
        return
    spec = PseudogroupSpec(S)
    ball = germ_ball(spec, F(0), 3)
    brute = _brute_force_word_lengths(S, 3)
    assert {g: n for g, (n, _) in ball.members.items()} == brute
    assert cayley_ball(S, 3) == brute


# --- metric invariants on small samples (the 1000-triple run is in acceptance) ---

CONSTRAINED = PseudogroupSpec(GeneratingSystem([("a", SANOV_A), ("b", SANOV_B)]), arc(-1, 3))


def test_subadditivity_and_inversion_sample():
    rng = random.Random(7)
    x = F(1, 2)
    ball_x = germ_ball(CONSTRAINED, x, 6)
    members = [g for g, (n, _) in ball_x.members.items() if n <= 3]
    for _ in range(40):
        gamma = rng.choice(members)
        y = act(gamma, x)
        ball_y = germ_ball(CONSTRAINED, y, 3)
        delta = rng.choice(list(ball_y.members))
        total = ball_x.length(gamma) + ball_y.length(delta)
        dg = ball_x.length(compose(delta, gamma))
        assert dg is not None and dg <= total
        assert ball_y.length(invert(gamma)) == ball_x.length(gamma)


def test_monotone_in_U():
    x = F(1, 2)
    small = germ_ball(CONSTRAINED, x, 5)
    big = germ_ball(CONSTRAINED.with_U(arc(-2, 5)), x, 5)
    for g, (n, _) in small.members.items():
        assert big.length(g) is not None and big.length(g) <= n
