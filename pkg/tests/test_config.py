import itertools
import random
from fractions import Fraction

import pytest

from cubecover.config import (
    FACES,
    Box6,
    NotReducible,
    all_symmetries,
    apply_symmetry,
    box_from_indices,
    box_indices,
    config_point,
    containing_indices,
    count_boxes,
    in_D,
    in_row_sum_domain,
    index_in_grid,
    o_polytope,
    q_polytope,
    r_rect,
    reduce_by_row_sums,
    reduce_to_D,
    region_digits,
    region_index,
    region_of,
    region_of_indices,
    regions,
    v_points,
)
from cubecover.geometry import contains, vertices

H = Fraction(1, 2)


def brute_grid(M):
    """Filter every index tuple through the defining inequalities."""
    out = []
    for k in itertools.product(range(M), range(M), range(M), range(2 * M), range(2 * M), range(2 * M)):
        if k[1] + k[3] <= k[0] + k[5] + 1 <= k[2] + k[4] + 2:
            out.append(k)
    return out


def test_face_points_differ_by_unit_vectors():
    p = config_point([Fraction(i, 7) for i in range(1, 7)])
    V = v_points(p)
    for i in range(3):
        a, b = V[2 * i], V[2 * i + 1]
        assert [y - x for x, y in zip(a, b)] == [1 if c == i else 0 for c in range(3)]
        assert a[i] == 0 and b[i] == 1


def test_config_point_rejects_out_of_range():
    with pytest.raises(ValueError):
        config_point([0, 0, 0, 0, 0, Fraction(3, 2)])
    with pytest.raises(ValueError):
        config_point([0] * 5)


@pytest.mark.parametrize("M, expected", [(1, 8), (2, 306)])
def test_small_grid_counts(M, expected):
    assert count_boxes(M) == expected
    assert list(box_indices(M)) == brute_grid(M)


def test_grid_count_matches_brute_force_m3():
    assert count_boxes(3) == len(brute_grid(3)) == sum(1 for _ in box_indices(3))


def test_grid_count_m10():
    assert count_boxes(10) == 1882010


def test_symmetry_group_and_images():
    syms = all_symmetries()
    assert len(syms) == 48 and len(set(syms)) == 48
    rng = random.Random(3)
    for _ in range(50):
        p = tuple(Fraction(rng.randint(0, 9), 9) for _ in range(6))
        for s in syms:
            img = apply_symmetry(s, p)
            assert set(v_points(img)) == {s.apply_point(x) for x in v_points(p)}
            assert set(s.apply_face(f) for f in FACES) == set(FACES)


def test_reduce_to_D_examples():
    p = (0, 0, 0, 0, 0, 0)
    assert reduce_to_D(p)[0] == tuple(Fraction(0) for _ in range(6))
    img, s = reduce_to_D((1, 1, 1, 0, 0, 0))
    assert in_D(img)
    assert set(v_points(img)) == {s.apply_point(x) for x in v_points((1, 1, 1, 0, 0, 0))}


def test_some_orbits_miss_the_grid_domain():
    # flips give p1, p2, p3 <= 1/2 but the row sort can move a large parameter into those slots
    p = (Fraction(41, 125), Fraction(781, 1000), Fraction(161, 1000),
         Fraction(409, 1000), Fraction(677, 1000), Fraction(863, 1000))
    assert not any(in_D(apply_symmetry(s, p)) for s in all_symmetries())
    with pytest.raises(NotReducible):
        reduce_to_D(p)
    img, s = reduce_by_row_sums(p)
    assert in_row_sum_domain(img)


def test_row_sum_domain_meets_every_orbit():
    rng = random.Random(11)
    for _ in range(300):
        p = tuple(Fraction(rng.randint(0, 20), 20) for _ in range(6))
        img, s = reduce_by_row_sums(p)
        assert in_row_sum_domain(img)
        assert set(v_points(img)) == {s.apply_point(x) for x in v_points(p)}


@pytest.mark.parametrize("M", [1, 2, 10])
def test_domain_points_lie_in_grid_boxes(M):
    rng = random.Random(M)
    n = 0
    while n < 300:
        p = tuple(Fraction(rng.randint(0, 10), 20) for _ in range(3)) + tuple(
            Fraction(rng.randint(0, 20), 20) for _ in range(3))
        if not in_D(p):
            continue
        n += 1
        k = containing_indices(p, M)
        assert index_in_grid(k, M) and box_from_indices(k, M).contains(p)


def test_box_basics():
    B = Box6.make([0] * 6, [Fraction(1, 20)] * 6)
    assert B.proper and B.volume == Fraction(1, 20) ** 6
    assert len(B.corners()) == 64
    assert len(Box6.point([H] * 6).corners()) == 1
    with pytest.raises(ValueError):
        Box6.make([Fraction(1, 2)] * 6, [0] * 6)


def test_regions():
    rs = regions()
    assert len(rs) == 512
    assert sum(r.volume for r in rs) == Fraction(1, 8)
    for rid in (0, 1, 37, 511):
        assert region_index(region_digits(rid)) == rid
    for k in list(box_indices(2))[:50]:
        assert region_of(box_from_indices(k, 2)) == region_of_indices(k, 2)


def test_q_polytope_inside_corner_polytopes():
    P = Box6.make([0] * 6, [Fraction(1, 20)] * 6)
    Q = q_polytope(P)
    V = vertices(Q).vertices
    for c in P.corners():
        O = o_polytope(c)
        assert all(contains(O, v) for v in V)
    assert 4 <= Q.q <= 64 * 8


def test_r_rect_corners():
    P = Box6.make([0, Fraction(1, 4), 0, 0, 0, 0], [Fraction(1, 2)] * 6)
    R = r_rect(P, (0, 1))
    assert set(R) == {(1, a, b) for a in (0, H) for b in (Fraction(1, 4), H)}
