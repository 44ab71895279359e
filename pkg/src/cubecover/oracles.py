"""Brute-force reference computations.

These are deliberately naive and share no code with the hull, double
description or simplex routines they are used to cross-check.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Sequence


def _det3(a, b, c):
    return (a[0] * (b[1] * c[2] - b[2] * c[1])
            - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0]))


def _canon(normal, offset):
    lead = next(abs(v) for v in normal if v)
    return (tuple(Fraction(v) / lead for v in normal), Fraction(offset) / lead)


def facet_oracle(points: Sequence) -> set:
    """Supporting planes through every non-collinear triple, as canonical ``(normal, offset)``."""
    pts = [tuple(Fraction(c) for c in p) for p in points]
    out = set()
    for a, b, c in itertools.combinations(pts, 3):
        u = tuple(b[i] - a[i] for i in range(3))
        v = tuple(c[i] - a[i] for i in range(3))
        n = (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])
        if n == (0, 0, 0):
            continue
        off = sum(n[i] * a[i] for i in range(3))
        vals = [sum(n[i] * p[i] for i in range(3)) for p in pts]
        if all(x <= off for x in vals):
            out.add(_canon(n, off))
        elif all(x >= off for x in vals):
            out.add(_canon(tuple(-x for x in n), -off))
    return out


def _solve(M, b):
    """Exact Gaussian elimination; None if singular."""
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(bb)] for row, bb in zip(M, b)]
    for col in range(n):
        piv = next((i for i in range(col, n) if A[i][col] != 0), None)
        if piv is None:
            return None
        A[col], A[piv] = A[piv], A[col]
        for i in range(n):
            if i != col and A[i][col] != 0:
                f = A[i][col] / A[col][col]
                A[i] = [x - f * y for x, y in zip(A[i], A[col])]
    return [A[i][n] / A[i][i] for i in range(n)]


def in_convex_hull(p, pts) -> bool:
    """Carathéodory: ``p`` is a convex combination of at most four of ``pts``."""
    p = tuple(Fraction(c) for c in p)
    pts = [tuple(Fraction(c) for c in q) for q in pts]
    for r in range(1, 5):
        for sub in itertools.combinations(pts, r):
            # least-squares free: solve sum l_i q_i = p, sum l_i = 1 on r unknowns
            rows = [[q[i] for q in sub] for i in range(3)] + [[Fraction(1)] * r]
            rhs = list(p) + [Fraction(1)]
            for pick in itertools.combinations(range(4), r):
                sol = _solve([rows[i] for i in pick], [rhs[i] for i in pick])
                if sol is None:
                    continue
                if all(x >= 0 for x in sol) and all(
                    sum(rows[i][j] * sol[j] for j in range(r)) == rhs[i] for i in range(4)
                ):
                    return True
                break
    return False


def extreme_points(points: Sequence) -> set:
    pts = list(dict.fromkeys(tuple(Fraction(c) for c in p) for p in points))
    return {p for i, p in enumerate(pts) if not in_convex_hull(p, pts[:i] + pts[i + 1:])}


def vertex_oracle(halfspaces: Sequence) -> set:
    """Vertices from every triple of facet planes, filtered by feasibility."""
    hs = [(tuple(Fraction(v) for v in h.normal), Fraction(h.offset)) for h in halfspaces]
    out = set()
    for trip in itertools.combinations(hs, 3):
        x = _solve([t[0] for t in trip], [t[1] for t in trip])
        if x is None:
            continue
        if all(sum(n[i] * x[i] for i in range(3)) <= c for n, c in hs):
            out.add(tuple(x))
    return out


def _row_space_basis(A):
    """Rows spanning the row space of ``A`` (as exact vectors)."""
    basis = []
    for row in A:
        trial = basis + [list(row)]
        if _rank(trial) > len(basis):
            basis.append([Fraction(x) for x in row])
    return basis


def _rank(rows) -> int:
    M = [[Fraction(x) for x in r] for r in rows]
    rank = 0
    ncols = len(M[0]) if M else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(M)) if M[i][col] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        for i in range(len(M)):
            if i != rank and M[i][col] != 0:
                f = M[i][col] / M[rank][col]
                M[i] = [x - f * y for x, y in zip(M[i], M[rank])]
        rank += 1
    return rank


def lp_feasible_oracle(A: Sequence[Sequence], c: Sequence) -> bool:
    """Feasibility of ``A x <= c`` by vertex enumeration.

    Components of ``x`` along the null space of ``A`` do not matter, so we
    restrict to ``x = B^T z`` with ``B`` a row-space basis.  The restricted
    polyhedron is pointed, hence nonempty iff one of its vertices (a basic
    solution of some square subsystem) is feasible.
    """
    A = [[Fraction(x) for x in row] for row in A]
    c = [Fraction(x) for x in c]
    B = _row_space_basis(A)
    r = len(B)
    if r == 0:
        return all(x >= 0 for x in c)
    AB = [[sum(row[k] * b[k] for k in range(len(row))) for b in B] for row in A]
    for rows in itertools.combinations(range(len(A)), r):
        z = _solve([AB[i] for i in rows], [c[i] for i in rows])
        if z is None:
            continue
        if all(sum(AB[i][j] * z[j] for j in range(r)) <= c[i] for i in range(len(A))):
            return True
    return False
