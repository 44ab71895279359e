"""The 14-translate covering system for one configuration box.

Eight translates of ``Q`` hold the cube vertices, six more hold the face
rectangles; every edge is covered either by its two endpoint translates or,
for the six edges picked by ``tau``, with help from a face translate.

Variable layout (60 columns)::

    a(v)   24  cube vertices in lexicographic order, xyz each
    b(f)   18  faces in face order, xyz each
    t_k    12  one per edge, edge index order
    s_f     6  second edge parameter for the edge tau(f), face order
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import lp
from .config import FACES, HALF, Box6, o_polytope, q_polytope, r_rect, v_points
from .geometry import (
    GeometryError,
    HPolytope,
    contains,
    dot,
    intersect,
    support,
    vertices,
)

N_VARS = 60
CUBE_VERTICES: tuple[tuple[int, int, int], ...] = tuple(itertools.product((0, 1), repeat=3))

TauMap = tuple[int, int, int, int, int, int]


# --------------------------------------------------------------------------
# cube edges


@dataclass(frozen=True)
class Edge:
    index: int
    axis: int
    start: tuple[int, int, int]

    @property
    def end(self) -> tuple[int, int, int]:
        e = list(self.start)
        e[self.axis] = 1
        return tuple(e)  # type: ignore[return-value]


def edge(index: int) -> Edge:
    if not 0 <= index < 12:
        raise ValueError(f"edge index {index} outside 0..11")
    axis, rest = divmod(index, 4)
    b1, b2 = divmod(rest, 2)
    fixed = [c for c in range(3) if c != axis]
    start = [0, 0, 0]
    start[fixed[0]] = b1
    start[fixed[1]] = b2
    return Edge(index, axis, tuple(start))  # type: ignore[arg-type]


EDGES: tuple[Edge, ...] = tuple(edge(k) for k in range(12))


def edge_on_face(k: int, face: tuple[int, int]) -> bool:
    e = EDGES[k]
    axis, side = face
    return e.axis != axis and e.start[axis] == side


FACE_EDGES: dict[tuple[int, int], tuple[int, ...]] = {
    f: tuple(k for k in range(12) if edge_on_face(k, f)) for f in FACES
}


def is_injective(tau: Sequence[int]) -> bool:
    return len(set(tau)) == len(tau)


def is_restricted(tau: Sequence[int]) -> bool:
    return len(tau) == 6 and all(edge_on_face(k, f) for k, f in zip(tau, FACES))


def enumerate_taus(restricted: bool = True) -> list[TauMap]:
    if restricted:
        choices = [FACE_EDGES[f] for f in FACES]
        return [t for t in itertools.product(*choices) if is_injective(t)]
    return list(itertools.permutations(range(12), 6))


# --------------------------------------------------------------------------
# variable layout


def a_slot(v: Sequence[int]) -> int:
    return 3 * CUBE_VERTICES.index(tuple(v))


def b_slot(face_pos: int) -> int:
    return 24 + 3 * face_pos


def t_slot(k: int) -> int:
    return 42 + k


def s_slot(face_pos: int) -> int:
    return 54 + face_pos


def variable_names() -> tuple[str, ...]:
    names = []
    for v in CUBE_VERTICES:
        names += [f"a{v[0]}{v[1]}{v[2]}_{c}" for c in "xyz"]
    for i, j in FACES:
        names += [f"b{i + 1}{j}_{c}" for c in "xyz"]
    names += [f"t{k}" for k in range(12)]
    names += [f"s{i + 1}{j}" for i, j in FACES]
    return tuple(names)


VARIABLE_NAMES = variable_names()


@dataclass(frozen=True)
class CoverLayout:
    """Decoded witness: every translate and edge parameter by name."""

    a: dict
    b: dict
    t: tuple[Fraction, ...]
    s: tuple[Fraction, ...]

    @classmethod
    def decode(cls, w: Sequence[Fraction]) -> "CoverLayout":
        if len(w) != N_VARS:
            raise lp.DimensionMismatch(f"expected {N_VARS} values, got {len(w)}")
        a = {v: tuple(w[a_slot(v): a_slot(v) + 3]) for v in CUBE_VERTICES}
        b = {f: tuple(w[b_slot(i): b_slot(i) + 3]) for i, f in enumerate(FACES)}
        return cls(a, b, tuple(w[42:54]), tuple(w[54:60]))


# --------------------------------------------------------------------------
# building the system


def _blocks(P: Box6, tau: Sequence[int]):
    """Containment constraints ``base + var * e_axis  in  translate + Q``.

    Returns a list of ``(base, var_slot or None, axis or None, translate_slot)``.
    """
    if not (is_injective(tau) and len(tau) == 6):
        raise ValueError(f"tau must be an injective map of the six faces: {tau}")
    out = []
    for v in CUBE_VERTICES:
        out.append((tuple(Fraction(c) for c in v), None, None, a_slot(v)))
    for pos, f in enumerate(FACES):
        for corner in r_rect(P, f):
            out.append((corner, None, None, b_slot(pos)))
    face_of_edge = {k: pos for pos, k in enumerate(tau)}
    for e in EDGES:
        start = tuple(Fraction(c) for c in e.start)
        if e.index not in face_of_edge:
            out.append((start, t_slot(e.index), e.axis, a_slot(e.start)))
            out.append((start, t_slot(e.index), e.axis, a_slot(e.end)))
        else:
            pos = face_of_edge[e.index]
            out.append((start, t_slot(e.index), e.axis, a_slot(e.start)))
            out.append((start, s_slot(pos), e.axis, a_slot(e.end)))
            out.append((start, t_slot(e.index), e.axis, b_slot(pos)))
            out.append((start, s_slot(pos), e.axis, b_slot(pos)))
    return out


def covering_row_count(q: int) -> int:
    return 68 * q


def build_lp(P: Box6, tau: Sequence[int], Q: HPolytope) -> lp.LinearSystem:
    """Rows of ``L(P, tau)``: 68q containment rows, then 36 bounds on edge parameters.

    A containment ``x in a + Q`` with facet ``n . y <= c`` reads
    ``n . x - n . a <= c``.
    """
    zero = Fraction(0)
    rows = []
    rhs = []
    for base, var, axis, tslot in _blocks(P, tau):
        for h in Q.halfspaces:
            row = [zero] * N_VARS
            n = h.normal
            row[tslot] = -n[0]
            row[tslot + 1] = -n[1]
            row[tslot + 2] = -n[2]
            if var is not None:
                row[var] = n[axis]
            rows.append(tuple(row))
            rhs.append(h.offset - dot(n, base))
    for var in list(range(42, 54)) + list(range(54, 60)):
        lo = [zero] * N_VARS
        lo[var] = Fraction(-1)
        hi = [zero] * N_VARS
        hi[var] = Fraction(1)
        rows.append(tuple(lo))
        rhs.append(zero)
        rows.append(tuple(hi))
        rhs.append(Fraction(1))
    return lp.LinearSystem(tuple(rows), tuple(rhs), VARIABLE_NAMES)


class FloatCover:
    """Float copy of the covering rows for one box, rebuilt cheaply per ``tau``."""

    def __init__(self, P: Box6, Q: HPolytope):
        self.P = P
        self.q = Q.q
        self.N = np.array([[float(v) for v in h.normal] for h in Q.halfspaces])
        self.c = np.array([float(h.offset) for h in Q.halfspaces])
        self._fixed = None

    def arrays(self, tau: Sequence[int]):
        from scipy import sparse

        q = self.q
        N, c = self.N, self.c
        blocks = _blocks(self.P, tau)
        nb = len(blocks)
        m = nb * q + 36
        data, ri, ci = [], [], []
        rhs = np.empty(m)
        rowids = np.arange(q)
        for bi, (base, var, axis, tslot) in enumerate(blocks):
            r0 = bi * q
            rr = r0 + rowids
            for d in range(3):
                ri.append(rr)
                ci.append(np.full(q, tslot + d))
                data.append(-N[:, d])
            if var is not None:
                ri.append(rr)
                ci.append(np.full(q, var))
                data.append(N[:, axis])
            rhs[rr] = c - N @ np.array([float(x) for x in base])
        r0 = nb * q
        for k, var in enumerate(range(42, 60)):
            ri.append(np.array([r0 + 2 * k, r0 + 2 * k + 1]))
            ci.append(np.array([var, var]))
            data.append(np.array([-1.0, 1.0]))
            rhs[r0 + 2 * k] = 0.0
            rhs[r0 + 2 * k + 1] = 1.0
        A = sparse.csr_matrix(
            (np.concatenate(data), (np.concatenate(ri), np.concatenate(ci))), shape=(m, N_VARS)
        )
        return A, rhs


# --------------------------------------------------------------------------
# witness re-check through polytope membership only


def witness_covers(P: Box6, tau: Sequence[int], Q: HPolytope, w: Sequence[Fraction]) -> bool:
    """Check the covering statements directly, without any LP rows."""
    L = CoverLayout.decode([Fraction(x) for x in w])

    def inside(point, translate):
        return contains(Q, tuple(x - y for x, y in zip(point, translate)))

    def on_edge(e: Edge, t):
        if not 0 <= t <= 1:
            return None
        pt = [Fraction(c) for c in e.start]
        pt[e.axis] += t
        return tuple(pt)

    for v in CUBE_VERTICES:
        if not inside(v, L.a[v]):
            return False
    for pos, f in enumerate(FACES):
        for corner in r_rect(P, f):
            if not inside(corner, L.b[f]):
                return False
    face_of_edge = {k: pos for pos, k in enumerate(tau)}
    for e in EDGES:
        x = on_edge(e, L.t[e.index])
        if x is None or not inside(x, L.a[e.start]):
            return False
        if e.index not in face_of_edge:
            if not inside(x, L.a[e.end]):
                return False
            continue
        pos = face_of_edge[e.index]
        y = on_edge(e, L.s[pos])
        if y is None or not inside(y, L.a[e.end]):
            return False
        bf = L.b[FACES[pos]]
        if not (inside(x, bf) and inside(y, bf)):
            return False
    return True


# --------------------------------------------------------------------------
# verification of one (box, tau) pair


@dataclass
class BoxVerdict:
    status: str  # "feasible" | "infeasible" | "geometry-error"
    witness: Optional[lp.Witness] = None
    pivots: int = 0
    detail: str = ""
    q: int = 0

    @property
    def feasible(self) -> bool:
        return self.status == "feasible"


def confirm_exact(P: Box6, tau: Sequence[int], Q: HPolytope, hint: Sequence[int] = ()) -> BoxVerdict:
    S = build_lp(P, tau, Q)
    rep = lp.feasible_exact(S, hint)
    if not rep.feasible:
        return BoxVerdict("infeasible", None, rep.pivots, "exact", Q.q)
    if not (lp.check_witness(S, rep.witness) and witness_covers(P, tau, Q, rep.witness.values)):
        raise AssertionError(f"exact witness failed re-check for box {P} tau {tau}")
    return BoxVerdict("feasible", rep.witness, rep.pivots, "exact", Q.q)


def verify_with_q(P: Box6, tau: Sequence[int], Q: HPolytope, prescreen: bool = True,
                  fc: Optional[FloatCover] = None) -> BoxVerdict:
    hint: Sequence[int] = ()
    if prescreen:
        fc = fc or FloatCover(P, Q)
        A, c = fc.arrays(tau)
        try:
            rep = lp.feasible_float_arrays(A, c)
        except lp.NumericalFailure:
            rep = None
        if rep is not None:
            if not rep.feasible:
                return BoxVerdict("infeasible", None, rep.pivots, "float", Q.q)
            hint = rep.active
    return confirm_exact(P, tau, Q, hint)


def verify_box(P: Box6, tau: Sequence[int], prescreen: bool = True) -> BoxVerdict:
    try:
        Q = q_polytope(P)
    except GeometryError as exc:
        return BoxVerdict("geometry-error", detail=f"{type(exc).__name__}: {exc}")
    return verify_with_q(P, tau, Q, prescreen)


# --------------------------------------------------------------------------
# structural checks


def fourteen_points() -> tuple:
    pbar = (HALF,) * 6
    return tuple(tuple(Fraction(c) for c in v) for v in CUBE_VERTICES) + v_points(pbar)


def _l1(n) -> Fraction:
    return sum((abs(v) for v in n), Fraction(0))


@dataclass
class PairVerdict:
    x: tuple
    y: tuple
    closed_feasible: bool
    margin: Fraction

    @property
    def open_infeasible(self) -> bool:
        return self.margin <= 0


def pair_margin(x, y, O: HPolytope) -> PairVerdict:
    """Best margin ``e`` with both points in ``a + O`` shrunk by ``e |n|_1`` per facet."""
    rows, rhs, weights = [], [], []
    for pt in (x, y):
        for h in O.halfspaces:
            rows.append(tuple(-v for v in h.normal))
            rhs.append(h.offset - dot(h.normal, pt))
            weights.append(_l1(h.normal))
    S = lp.LinearSystem(tuple(rows), tuple(rhs))
    res = lp.max_margin(S, weights)
    if res.status != "optimal":  # pragma: no cover - margins are bounded for bounded O
        raise AssertionError(f"pair margin LP returned {res.status}")
    return PairVerdict(tuple(x), tuple(y), res.value >= 0, res.value)


def lower_bound_pairs() -> list[PairVerdict]:
    O = o_polytope((HALF,) * 6)
    pts = fourteen_points()
    return [pair_margin(x, y, O) for x, y in itertools.combinations(pts, 2)]


def lower_bound_check() -> bool:
    """No translate of the open centered octahedron holds two of the 14 points."""
    pairs = lower_bound_pairs()
    return len(pairs) == 91 and all(p.open_infeasible for p in pairs)


def inclusion_check(P: Box6, p, Q: Optional[HPolytope] = None) -> bool:
    Q = Q if Q is not None else q_polytope(P)
    return all(support(Q, h.normal) <= h.offset for h in o_polytope(p).halfspaces)


class NoStrictTranslate(AssertionError):
    pass


@dataclass
class StrictTranslate:
    translate: tuple[Fraction, Fraction, Fraction]
    margin: Fraction


def strict_translate(P: Box6, p, Q: Optional[HPolytope] = None) -> StrictTranslate:
    """Translate of ``Q`` sitting strictly inside the polytope of ``p``.

    Maximizes ``e`` subject to ``h(Q, n) + n . w <= c - e |n|_1`` over facets
    ``(n, c)`` of the target.
    """
    Q = Q if Q is not None else q_polytope(P)
    O = o_polytope(p)
    rows, rhs, weights = [], [], []
    for h in O.halfspaces:
        rows.append(h.normal)
        rhs.append(h.offset - support(Q, h.normal))
        weights.append(_l1(h.normal))
    res = lp.max_margin(lp.LinearSystem(tuple(rows), tuple(rhs)), weights)
    if res.status != "optimal" or res.value <= 0:
        raise NoStrictTranslate(f"no strict translate for box {P} at {p}: {res.status} {res.value}")
    w = res.witness.values
    return StrictTranslate((w[0], w[1], w[2]), res.value)


def segment_fact_check(q, r, p, trials: int, rng: Optional[random.Random] = None) -> bool:
    """Sample points of ``O_q  n  O_r`` and test membership in ``O_p``."""
    rng = rng or random.Random(0)
    q = tuple(Fraction(v) for v in q)
    r = tuple(Fraction(v) for v in r)
    p = tuple(Fraction(v) for v in p)
    Op = o_polytope(p)
    if q == r:
        I = o_polytope(q)
    else:
        I = intersect([o_polytope(q), o_polytope(r)])
    V = vertices(I).vertices
    samples = list(V)
    while len(samples) < trials:
        wts = [Fraction(rng.randint(0, 16)) for _ in V]
        tot = sum(wts)
        if not tot:
            continue
        samples.append(tuple(sum(wi * v[c] for wi, v in zip(wts, V)) / tot for c in range(3)))
    return all(contains(Op, x) for x in samples[: max(trials, len(V))])
