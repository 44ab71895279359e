"""Configuration space of face-point sextuples.

A configuration ``p`` in ``[0,1]^6`` places one point on every face of the
unit cube, opposite points differing by a unit vector.  Faces are ordered
``(1,0), (1,1), (2,0), (2,1), (3,0), (3,1)`` everywhere in this package and
stored 0-based as ``(axis, side)`` with ``axis`` in ``0..2``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from .geometry import HPolytope, Vec3, hull3, intersect

HALF = Fraction(1, 2)

FACES: tuple[tuple[int, int], ...] = ((0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 1))

ConfigPoint = tuple[Fraction, Fraction, Fraction, Fraction, Fraction, Fraction]

# which entries of p describe the point on faces of a given axis, by cube coordinate
_FACE_PARAMS = {
    0: {1: 0, 2: 1},  # face x1 = j: (j, p1, p2)
    1: {0: 2, 2: 3},  # face x2 = j: (p3, j, p4)
    2: {0: 4, 1: 5},  # face x3 = j: (p5, p6, j)
}


def config_point(values: Sequence) -> ConfigPoint:
    p = tuple(Fraction(v) for v in values)
    if len(p) != 6:
        raise ValueError("a configuration has six coordinates")
    if any(v < 0 or v > 1 for v in p):
        raise ValueError(f"configuration outside [0,1]^6: {p}")
    return p  # type: ignore[return-value]


def face_point(p: Sequence[Fraction], face: tuple[int, int]) -> Vec3:
    axis, side = face
    pt = [Fraction(0)] * 3
    pt[axis] = Fraction(side)
    for coord, idx in _FACE_PARAMS[axis].items():
        pt[coord] = p[idx]
    return tuple(pt)  # type: ignore[return-value]


def v_points(p: Sequence[Fraction]) -> tuple[Vec3, ...]:
    """Columns of the face-point matrix, in face order."""
    return tuple(face_point(p, f) for f in FACES)


def o_polytope(p: Sequence[Fraction]) -> HPolytope:
    return hull3(v_points(p))


# --------------------------------------------------------------------------
# symmetries of the cube


@dataclass(frozen=True)
class CubeSymmetry:
    """``x -> y`` with ``y[k] = x[perm[k]]``, then ``y[k] -> 1 - y[k]`` where ``flips[k]``."""

    perm: tuple[int, int, int] = (0, 1, 2)
    flips: tuple[bool, bool, bool] = (False, False, False)

    def apply_point(self, x: Sequence) -> Vec3:
        out = []
        for k in range(3):
            v = Fraction(x[self.perm[k]])
            out.append(1 - v if self.flips[k] else v)
        return tuple(out)  # type: ignore[return-value]

    def apply_face(self, face: tuple[int, int]) -> tuple[int, int]:
        axis, side = face
        k = self.perm.index(axis)
        return (k, 1 - side if self.flips[k] else side)

    @property
    def is_identity(self) -> bool:
        return self.perm == (0, 1, 2) and not any(self.flips)


IDENTITY = CubeSymmetry()


def all_symmetries() -> list[CubeSymmetry]:
    return [
        CubeSymmetry(perm, flips)
        for perm in itertools.permutations(range(3))
        for flips in itertools.product((False, True), repeat=3)
    ]


def apply_symmetry(s: CubeSymmetry, p: Sequence) -> ConfigPoint:
    """Configuration whose face points are the images of those of ``p``."""
    out = [Fraction(0)] * 6
    for face in FACES:
        img = s.apply_point(face_point(p, face))
        axis, _ = s.apply_face(face)
        for coord, idx in _FACE_PARAMS[axis].items():
            out[idx] = img[coord]
    return tuple(out)  # type: ignore[return-value]


def in_D(p: Sequence) -> bool:
    """Membership in the fundamental domain used for the box grid."""
    if any(not (0 <= p[i] <= HALF) for i in range(3)):
        return False
    if any(not (0 <= p[i] <= 1) for i in range(3, 6)):
        return False
    return p[1] + p[3] <= p[0] + p[5] <= p[2] + p[4]


_SYMMETRIES = all_symmetries()


class NotReducible(ValueError):
    """No cube symmetry maps the configuration into the fundamental domain."""


def reduce_to_D(p: Sequence) -> tuple[ConfigPoint, CubeSymmetry]:
    """Map ``p`` into the grid domain; ties go to the smallest image.

    Not every configuration has an image there: flipping coordinates makes
    ``p1, p2, p3 <= 1/2``, but the axis permutation that orders the row sums
    can move a parameter larger than one half into those slots.  Such inputs
    raise :class:`NotReducible`.
    """
    p = config_point(p)
    if in_D(p):
        return p, IDENTITY
    best = None
    for s in _SYMMETRIES:
        img = apply_symmetry(s, p)
        if in_D(img) and (best is None or img < best[0]):
            best = (img, s)
    if best is None:
        raise NotReducible(f"no cube symmetry maps {tuple(str(v) for v in p)} into D")
    return best


def row_sums(p: Sequence) -> tuple[Fraction, Fraction, Fraction]:
    """Sums of the two free entries in each row of the face-point matrix."""
    return (p[2] + p[4], p[0] + p[5], p[1] + p[3])


def in_row_sum_domain(p: Sequence) -> bool:
    s1, s2, s3 = row_sums(p)
    return all(0 <= v <= 1 for v in p) and s3 <= s2 <= s1 <= 1


def reduce_by_row_sums(p: Sequence) -> tuple[ConfigPoint, CubeSymmetry]:
    """Map ``p`` into ``{p2+p4 <= p1+p6 <= p3+p5 <= 1}``, which every orbit meets.

    Flipping axis ``k`` replaces row sum ``s`` by ``2 - s`` and permuting axes
    permutes the row sums, so the flips bring every sum to at most one and a
    permutation sorts them.
    """
    p = config_point(p)
    best = None
    for s in _SYMMETRIES:
        img = apply_symmetry(s, p)
        if in_row_sum_domain(img) and (best is None or img < best[0]):
            best = (img, s)
    if best is None:  # pragma: no cover - excluded by the argument above
        raise AssertionError(f"row-sum reduction failed for {p}")
    return best


# --------------------------------------------------------------------------
# boxes in configuration space


@dataclass(frozen=True)
class Box6:
    lo: tuple[Fraction, ...]
    hi: tuple[Fraction, ...]
    region_id: Optional[int] = None

    def __post_init__(self):
        if len(self.lo) != 6 or len(self.hi) != 6:
            raise ValueError("a box has six coordinate intervals")
        for a, b in zip(self.lo, self.hi):
            if not (0 <= a <= b <= 1):
                raise ValueError(f"invalid box interval [{a}, {b}]")

    @classmethod
    def make(cls, lo, hi, region_id=None) -> "Box6":
        return cls(tuple(Fraction(v) for v in lo), tuple(Fraction(v) for v in hi), region_id)

    @classmethod
    def point(cls, p) -> "Box6":
        """Zero-width box; only meaningful in tests."""
        return cls.make(p, p)

    @property
    def proper(self) -> bool:
        return all(a < b for a, b in zip(self.lo, self.hi))

    @property
    def widths(self) -> tuple[Fraction, ...]:
        return tuple(b - a for a, b in zip(self.lo, self.hi))

    @property
    def volume(self) -> Fraction:
        v = Fraction(1)
        for w in self.widths:
            v *= w
        return v

    @property
    def center(self) -> ConfigPoint:
        return tuple((a + b) / 2 for a, b in zip(self.lo, self.hi))  # type: ignore[return-value]

    def corners(self) -> list[ConfigPoint]:
        seen = {}
        for bits in itertools.product((0, 1), repeat=6):
            c = tuple(self.hi[i] if bits[i] else self.lo[i] for i in range(6))
            seen.setdefault(c, None)
        return list(seen)  # type: ignore[return-value]

    def contains(self, p) -> bool:
        return all(a <= v <= b for a, v, b in zip(self.lo, p, self.hi))

    def key(self):
        return (self.lo, self.hi)

    def without_region(self) -> "Box6":
        return Box6(self.lo, self.hi, None)


def box_indices(M: int) -> Iterator[tuple[int, ...]]:
    """Grid indices ``k`` of the boxes covering the fundamental domain, lexicographic."""
    if M < 1:
        raise ValueError("M must be positive")
    rM, r2M = range(M), range(2 * M)
    for k1 in rM:
        for k2 in rM:
            for k3 in rM:
                for k4 in r2M:
                    s24 = k2 + k4
                    for k5 in r2M:
                        s35 = k3 + k5 + 2
                        for k6 in r2M:
                            mid = k1 + k6 + 1
                            if s24 <= mid <= s35:
                                yield (k1, k2, k3, k4, k5, k6)


def count_boxes(M: int) -> int:
    """Number of grid boxes for ``M``, counted without materializing them."""
    if M < 1:
        raise ValueError("M must be positive")
    total = 0
    r2M = range(2 * M)
    for k1 in range(M):
        for k2 in range(M):
            for k3 in range(M):
                for k4 in r2M:
                    for k6 in r2M:
                        mid = k1 + k6 + 1
                        if k2 + k4 > mid:
                            continue
                        # k5 >= mid - k3 - 2
                        lo5 = max(0, mid - k3 - 2)
                        if lo5 < 2 * M:
                            total += 2 * M - lo5
    return total


def box_from_indices(k: Sequence[int], M: int) -> Box6:
    h = Fraction(1, 2 * M)
    return Box6(tuple(ki * h for ki in k), tuple((ki + 1) * h for ki in k))


def enumerate_boxes(M: int) -> Iterator[Box6]:
    for k in box_indices(M):
        yield box_from_indices(k, M)


def containing_indices(p: Sequence, M: int) -> tuple[int, ...]:
    """Grid index of a box containing ``p`` in the fundamental domain, with the upper-edge rule."""
    h = Fraction(1, 2 * M)
    k = []
    for i, v in enumerate(p):
        ki = int(Fraction(v) // h)
        top = M - 1 if i < 3 else 2 * M - 1
        k.append(min(ki, top))
    return tuple(k)


def index_in_grid(k: Sequence[int], M: int) -> bool:
    if any(not (0 <= k[i] <= M - 1) for i in range(3)):
        return False
    if any(not (0 <= k[i] <= 2 * M - 1) for i in range(3, 6)):
        return False
    return k[1] + k[3] <= k[0] + k[5] + 1 <= k[2] + k[4] + 2


REGION_SHAPE = (2, 2, 2, 4, 4, 4)
QUARTER = Fraction(1, 4)


def region_index(j: Sequence[int]) -> int:
    rid = 0
    for ji, n in zip(j, REGION_SHAPE):
        rid = rid * n + ji
    return rid


def region_digits(region_id: int) -> tuple[int, ...]:
    if not 0 <= region_id < 512:
        raise ValueError(f"region id {region_id} outside 0..511")
    out = []
    for n in reversed(REGION_SHAPE):
        out.append(region_id % n)
        region_id //= n
    return tuple(reversed(out))


def regions() -> list[Box6]:
    out = []
    for j in itertools.product(*(range(n) for n in REGION_SHAPE)):
        lo = tuple(ji * QUARTER for ji in j)
        out.append(Box6(lo, tuple(v + QUARTER for v in lo), region_index(j)))
    return out


def region_of(box: Box6) -> int:
    """Region holding the lower corner of ``box``; it contains the whole box when M is even."""
    return region_index([min(int(v // QUARTER), n - 1) for v, n in zip(box.lo, REGION_SHAPE)])


def region_of_indices(k: Sequence[int], M: int) -> int:
    # lower corner k*h with h = 1/(2M): floor(k / (2M) * 4) = floor(2k / M)
    return region_index([min((2 * ki) // M, n - 1) for ki, n in zip(k, REGION_SHAPE)])


# --------------------------------------------------------------------------
# covering polytopes


def q_polytope(P: Box6) -> HPolytope:
    """Intersection of the polytopes of all corner configurations of ``P``."""
    return intersect([o_polytope(c) for c in P.corners()])


def r_rect(P: Box6, face: tuple[int, int]) -> tuple[Vec3, ...]:
    """Corners of the rectangle swept on ``face`` by face points of ``P``."""
    axis, side = face
    (c1, i1), (c2, i2) = sorted(_FACE_PARAMS[axis].items())
    out = []
    for a in (P.lo[i1], P.hi[i1]):
        for b in (P.lo[i2], P.hi[i2]):
            pt = [Fraction(0)] * 3
            pt[axis] = Fraction(side)
            pt[c1] = a
            pt[c2] = b
            out.append(tuple(pt))
    return tuple(out)
