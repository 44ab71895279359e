"""Exact rational polytope kernel for three dimensions.

Points are tuples of three :class:`~fractions.Fraction`.  Predicates are
evaluated on integer coordinates obtained by clearing a common denominator,
which keeps the inner loops on Python ints.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .lp import LinearSystem, maximize

Vec3 = tuple[Fraction, Fraction, Fraction]


class GeometryError(Exception):
    pass


class DegenerateHull(GeometryError):
    pass


class EmptyIntersection(GeometryError):
    pass


class Unbounded(GeometryError):
    pass


class Degenerate(GeometryError):
    pass


def vec3(x, y, z) -> Vec3:
    return (Fraction(x), Fraction(y), Fraction(z))


def dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def sub(a, b):
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


@dataclass(frozen=True)
class Halfspace:
    """``{x : normal . x <= offset}`` in canonical scale.

    Construct through :meth:`make`, which divides by the absolute value of the
    first nonzero normal coordinate so equal halfspaces compare equal.
    """

    normal: Vec3
    offset: Fraction

    @classmethod
    def make(cls, normal: Sequence, offset) -> "Halfspace":
        n = tuple(Fraction(v) for v in normal)
        lead = next((abs(v) for v in n if v), None)
        if lead is None:
            raise ValueError("halfspace normal must be nonzero")
        return cls((n[0] / lead, n[1] / lead, n[2] / lead), Fraction(offset) / lead)

    def slack(self, x) -> Fraction:
        return self.offset - dot(self.normal, x)

    def contains(self, x) -> bool:
        return dot(self.normal, x) <= self.offset

    def translate(self, w) -> "Halfspace":
        return Halfspace(self.normal, self.offset + dot(self.normal, w))

    def homogeneous(self) -> tuple[int, int, int, int]:
        """Primitive integer vector ``h`` with ``h . (1, x) >= 0`` iff ``x`` inside."""
        vals = (self.offset, -self.normal[0], -self.normal[1], -self.normal[2])
        den = math.lcm(*(v.denominator for v in vals))
        ints = [int(v * den) for v in vals]
        g = math.gcd(*ints)
        return tuple(v // g for v in ints)


@dataclass(frozen=True)
class HPolytope:
    halfspaces: tuple[Halfspace, ...]

    @property
    def q(self) -> int:
        return len(self.halfspaces)

    def system(self) -> LinearSystem:
        return LinearSystem(
            tuple(h.normal for h in self.halfspaces),
            tuple(h.offset for h in self.halfspaces),
            ("x1", "x2", "x3"),
        )

    def translate(self, w) -> "HPolytope":
        return HPolytope(tuple(h.translate(w) for h in self.halfspaces))


@dataclass(frozen=True)
class VPolytope:
    vertices: tuple[Vec3, ...]


def contains(P: HPolytope, x) -> bool:
    x = tuple(Fraction(v) for v in x)
    return all(h.contains(x) for h in P.halfspaces)


def canonicalize(halfspaces: Iterable[Halfspace]) -> tuple[Halfspace, ...]:
    """Deduplicate canonical halfspaces, keeping first occurrences."""
    seen = set()
    out = []
    for h in halfspaces:
        if h not in seen:
            seen.add(h)
            out.append(h)
    return tuple(out)


# --------------------------------------------------------------------------
# convex hull by incremental insertion


def _common_scale(points) -> int:
    return math.lcm(*(c.denominator for p in points for c in p)) if points else 1


def _affine_basis(ip):
    """Indices of four affinely independent integer points, or None."""
    p0 = ip[0]
    i1 = next((i for i in range(1, len(ip)) if ip[i] != p0), None)
    if i1 is None:
        return None
    d1 = sub(ip[i1], p0)
    i2 = next((i for i in range(len(ip)) if cross(d1, sub(ip[i], p0)) != (0, 0, 0)), None)
    if i2 is None:
        return None
    nrm = cross(d1, sub(ip[i2], p0))
    i3 = next((i for i in range(len(ip)) if dot(nrm, sub(ip[i], p0)) != 0), None)
    if i3 is None:
        return None
    return 0, i1, i2, i3


def hull3(points: Sequence) -> HPolytope:
    """Facet inequalities of the convex hull of ``points``.

    Raises :class:`DegenerateHull` when the points do not span space.
    """
    pts = []
    seen = set()
    for p in points:
        t = tuple(Fraction(c) for c in p)
        if t not in seen:
            seen.add(t)
            pts.append(t)
    if len(pts) < 4:
        raise DegenerateHull(f"{len(pts)} distinct points cannot span a 3-dimensional hull")
    den = _common_scale(pts)
    ip = [tuple(int(c * den) for c in p) for p in pts]
    base = _affine_basis(ip)
    if base is None:
        raise DegenerateHull("points are coplanar")
    a, b, c, d = base
    faces = []
    for f in ((a, b, c), (a, c, d), (a, d, b), (b, d, c)):
        u, v, w = f
        other = ({a, b, c, d} - set(f)).pop()
        nrm = cross(sub(ip[v], ip[u]), sub(ip[w], ip[u]))
        if dot(nrm, sub(ip[other], ip[u])) > 0:
            f = (u, w, v)
        faces.append(f)

    def normal(f):
        u, v, w = f
        return cross(sub(ip[v], ip[u]), sub(ip[w], ip[u]))

    face_data = [(f, normal(f)) for f in faces]
    for k in range(len(ip)):
        if k in base:
            continue
        pk = ip[k]
        visible = [fd for fd in face_data if dot(fd[1], sub(pk, ip[fd[0][0]])) > 0]
        if not visible:
            continue
        vis_edges = set()
        for (u, v, w), _ in visible:
            vis_edges.update(((u, v), (v, w), (w, u)))
        horizon = [e for e in vis_edges if (e[1], e[0]) not in vis_edges]
        horizon.sort()
        face_data = [fd for fd in face_data if dot(fd[1], sub(pk, ip[fd[0][0]])) <= 0]
        for u, v in horizon:
            f = (u, v, k)
            face_data.append((f, normal(f)))

    out = []
    for (u, _, _), nrm in face_data:
        out.append(Halfspace.make(nrm, Fraction(dot(nrm, ip[u]), den)))
    return HPolytope(canonicalize(out))


# --------------------------------------------------------------------------
# double description (homogenized cone in four dimensions)


def _rank(vectors) -> int:
    rows = [[Fraction(v) for v in r] for r in vectors]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pr = rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                f = rows[i][col] / pr[col]
                rows[i] = [x - f * y for x, y in zip(rows[i], pr)]
        rank += 1
    return rank


def _primitive(v):
    g = math.gcd(*v)
    return tuple(x // g for x in v) if g > 1 else tuple(v)


def _hdot(h, r):
    return h[0] * r[0] + h[1] * r[1] + h[2] * r[2] + h[3] * r[3]


def _initial_rays(H):
    """Extreme rays of the simplicial cone ``H r >= 0`` for invertible 4x4 ``H``."""
    n = 4
    M = [[Fraction(H[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next(i for i in range(col, n) if M[i][col] != 0)
        M[col], M[piv] = M[piv], M[col]
        pv = M[col][col]
        M[col] = [x / pv for x in M[col]]
        for i in range(n):
            if i != col and M[i][col] != 0:
                f = M[i][col]
                M[i] = [x - f * y for x, y in zip(M[i], M[col])]
    inv = [row[n:] for row in M]
    rays = []
    for k in range(n):
        colk = [inv[i][k] for i in range(n)]
        den = math.lcm(*(v.denominator for v in colk))
        rays.append(_primitive([int(v * den) for v in colk]))
    return rays


def _double_description(hs: Sequence[tuple[int, int, int, int]]):
    """Extreme rays of ``{z : h . z >= 0}`` plus ``z0 >= 0``; returns ``[(ray, zero_mask)]``."""
    m = len(hs)
    x0 = (1, 0, 0, 0)
    allh = list(hs) + [x0]
    chosen = [m]
    for i in range(m):
        if len(chosen) == 4:
            break
        if _rank([allh[j] for j in chosen] + [allh[i]]) > len(chosen):
            chosen.append(i)
    if len(chosen) < 4:
        raise Unbounded("constraint normals do not span space")
    rays = _initial_rays([allh[j] for j in chosen])
    entries = []
    for k, r in enumerate(rays):
        mask = 0
        for kk, j in enumerate(chosen):
            if kk != k:
                mask |= 1 << j
        entries.append((r, mask))
    chosen_set = set(chosen)
    for i in range(m):
        if i in chosen_set:
            continue
        h = allh[i]
        bit = 1 << i
        pos, neg, zero = [], [], []
        for r, mask in entries:
            s = _hdot(h, r)
            if s > 0:
                pos.append((r, mask, s))
            elif s < 0:
                neg.append((r, mask, s))
            else:
                zero.append((r, mask | bit))
        if not neg:
            entries = [(r, mask) for r, mask, _ in pos] + zero
            continue
        masks = [mask for _, mask in entries]
        new = []
        for rp, mp, sp in pos:
            for rn, mn, sn in neg:
                Z = mp & mn
                if Z.bit_count() < 2:
                    continue
                adjacent = True
                for mo in masks:
                    if mo != mp and mo != mn and (mo & Z) == Z:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                r = _primitive([sp * a - sn * b for a, b in zip(rn, rp)])
                new.append((r, Z | bit))
        entries = [(r, mask) for r, mask, _ in pos] + zero + new
        if not entries:
            break
    return entries


def _vertex_data(P: HPolytope):
    hs = [h.homogeneous() for h in P.halfspaces]
    entries = _double_description(hs)
    verts = []
    for r, mask in entries:
        if r[0] < 0:  # pragma: no cover - excluded by z0 >= 0
            raise AssertionError("double description produced a ray with negative z0")
        if r[0] == 0:
            if any(r):
                raise Unbounded("polyhedron has a recession direction")
            continue
        verts.append((r, mask))
    if not verts:
        raise EmptyIntersection("no feasible point")
    return hs, verts


def vertices(P: HPolytope) -> VPolytope:
    """Exact vertex list (sorted) of a bounded full-dimensional polytope."""
    _, verts = _vertex_data(P)
    if _rank([r for r, _ in verts]) < 4:
        raise Degenerate("polytope is not full-dimensional")
    pts = sorted(tuple(Fraction(r[k], r[0]) for k in (1, 2, 3)) for r, _ in verts)
    return VPolytope(tuple(pts))


def remove_redundant(P: HPolytope) -> HPolytope:
    """Keep exactly the facet-defining halfspaces, in input order.

    A halfspace is kept when the vertices tight on it span a plane, which is
    equivalent to its being tight on a two-dimensional face.
    """
    P = HPolytope(canonicalize(P.halfspaces))
    _, verts = _vertex_data(P)
    if _rank([r for r, _ in verts]) < 4:
        raise Degenerate("polytope is not full-dimensional")
    keep = []
    for i, h in enumerate(P.halfspaces):
        bit = 1 << i
        tight = [r for r, mask in verts if mask & bit]
        if len(tight) >= 3 and _rank(tight) == 3:
            keep.append(h)
    return HPolytope(tuple(keep))


def intersect(polytopes: Sequence[HPolytope]) -> HPolytope:
    if not polytopes:
        raise ValueError("intersect needs at least one polytope")
    hs = canonicalize(h for P in polytopes for h in P.halfspaces)
    return remove_redundant(HPolytope(hs))


def support(P: HPolytope, direction) -> Fraction:
    """``max direction . x`` over ``P`` by exact LP."""
    res = maximize(P.system(), [Fraction(v) for v in direction])
    if res.status == "infeasible":
        raise EmptyIntersection("support of an empty polytope")
    if res.status == "unbounded":
        raise Unbounded("support function is unbounded in this direction")
    return res.value


def support_by_vertices(V: VPolytope, direction) -> Fraction:
    d = [Fraction(v) for v in direction]
    return max(dot(d, v) for v in V.vertices)
