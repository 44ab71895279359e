import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cubecover import oracles
from cubecover.geometry import (
    DegenerateHull,
    EmptyIntersection,
    Halfspace,
    HPolytope,
    contains,
    hull3,
    intersect,
    remove_redundant,
    support,
    support_by_vertices,
    vertices,
)
from cubecover.config import o_polytope

H = Fraction(1, 2)
PBAR = (H,) * 6
SIMPLEX = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]


def cube():
    hs = []
    for i in range(3):
        n = [0, 0, 0]
        n[i] = 1
        hs.append(Halfspace.make(n, 1))
        n[i] = -1
        hs.append(Halfspace.make(n, 0))
    return HPolytope(tuple(hs))


def test_halfspace_canonical_form():
    h = Halfspace.make((0, -3, 6), 9)
    assert h.normal == (0, -1, 2) and h.offset == 3
    assert Halfspace.make((0, -1, 2), 3) == h
    with pytest.raises(ValueError):
        Halfspace.make((0, 0, 0), 1)


def test_hull_of_simplex():
    P = hull3(SIMPLEX)
    assert P.q == 4
    assert set(vertices(P).vertices) == {tuple(Fraction(c) for c in v) for v in SIMPLEX}


def test_octahedron_at_center():
    O = o_polytope(PBAR)
    assert O.q == 8
    for h in O.halfspaces:
        assert all(abs(c) == 1 for c in h.normal)
        center_value = sum(c * H for c in h.normal)
        assert h.offset - center_value == H


def test_contains_examples():
    O = o_polytope(PBAR)
    assert contains(O, (H, H, H))
    assert not contains(O, (0, 0, 0))
    assert contains(O, (0, H, H))


def test_degenerate_hull_reported():
    with pytest.raises(DegenerateHull):
        hull3([(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0)])
    with pytest.raises(DegenerateHull):
        hull3([(0, 0, 0), (1, 1, 1), (2, 2, 2), (3, 3, 3)])
    with pytest.raises(DegenerateHull):
        hull3(SIMPLEX[:3])


def test_intersection_of_shifted_simplices():
    A = hull3(SIMPLEX)
    B = hull3([(Fraction(1, 4) + x, y, z) for x, y, z in SIMPLEX])
    I = intersect([A, B])
    assert all(contains(A, v) and contains(B, v) for v in vertices(I).vertices)
    assert set(vertices(I).vertices) == oracles.vertex_oracle(A.halfspaces + B.halfspaces)


def test_intersection_empty_and_redundant():
    A = hull3(SIMPLEX)
    far = hull3([(5 + x, y, z) for x, y, z in SIMPLEX])
    with pytest.raises(EmptyIntersection):
        intersect([A, far])
    C = cube()
    loose = HPolytope(C.halfspaces + (Halfspace.make((1, 1, 1), 5),))
    assert set(remove_redundant(loose).halfspaces) == set(C.halfspaces)


def test_support_function():
    C = cube()
    assert support(C, (1, 1, 1)) == 3
    O = o_polytope(PBAR)
    for d in [(1, 0, 0), (1, -2, 3), (Fraction(1, 3), 0, -1)]:
        assert support(O, d) == support_by_vertices(vertices(O), d)


def test_random_hulls_match_oracle():
    rng = random.Random(7)
    done = 0
    while done < 60:
        pts = [tuple(Fraction(rng.randint(0, 8), 8) for _ in range(3)) for _ in range(6)]
        try:
            P = hull3(pts)
        except DegenerateHull:
            continue
        done += 1
        assert {(h.normal, h.offset) for h in P.halfspaces} == oracles.facet_oracle(pts)
        assert set(vertices(P).vertices) == oracles.extreme_points(pts)
        assert all(contains(P, p) for p in pts)


coord = st.fractions(min_value=0, max_value=1, max_denominator=12)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(coord, coord, coord), min_size=5, max_size=8))
def test_hull_every_facet_tight_on_three_points(pts):
    try:
        P = hull3(pts)
    except DegenerateHull:
        return
    for h in P.halfspaces:
        tight = [p for p in pts if h.slack(p) == 0]
        assert len(set(tight)) >= 3
        assert all(h.contains(p) for p in pts)
