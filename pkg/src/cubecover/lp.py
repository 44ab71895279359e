"""Exact and floating-point feasibility of systems ``A x <= c``.

The exact solver never touches floats. Each row of the system is scaled to
integers and the problem is handed to a revised simplex that keeps the basis
inverse as an integer adjugate plus a determinant (fraction-free pivoting),
with Bland's least-index rule for termination.

Feasibility is decided through the max-margin program

    maximize s  subject to  A x + s w <= c

whose dual ``min c.y, A^T y = 0, w.y = 1, y >= 0`` has only ``n + 1`` rows.
The primal point is read off the simplex multipliers, so the number of
inequalities only affects pricing, which is cheap because the rows of the
covering systems are very sparse.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

Rational = Fraction

FLOAT_TOLERANCE = 1e-9


class DimensionMismatch(ValueError):
    pass


class NumericalFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class LinearSystem:
    """Rows ``A x <= c`` over exact rationals."""

    rows: tuple[tuple[Fraction, ...], ...]
    rhs: tuple[Fraction, ...]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.rows) != len(self.rhs):
            raise DimensionMismatch(f"{len(self.rows)} rows but {len(self.rhs)} right-hand sides")
        n = self.n
        for r in self.rows:
            if len(r) != n:
                raise DimensionMismatch("ragged constraint matrix")
        if self.names and len(self.names) != n:
            raise DimensionMismatch("variable names do not match column count")

    @classmethod
    def build(cls, rows, rhs, names=()) -> "LinearSystem":
        return cls(
            tuple(tuple(Fraction(v) for v in r) for r in rows),
            tuple(Fraction(v) for v in rhs),
            tuple(names),
        )

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def n(self) -> int:
        if self.names:
            return len(self.names)
        return len(self.rows[0]) if self.rows else 0

    def to_float(self) -> tuple[np.ndarray, np.ndarray]:
        A = np.array([[float(v) for v in r] for r in self.rows], dtype=float).reshape(self.m, self.n)
        c = np.array([float(v) for v in self.rhs], dtype=float)
        return A, c


@dataclass(frozen=True)
class Witness:
    values: tuple[Fraction, ...]

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]


@dataclass
class FeasReport:
    feasible: bool
    witness: Optional[Witness] = None
    pivots: int = 0
    mode: str = "exact"
    # best margin found by the float solver; None in exact mode
    margin: Optional[float] = None
    active: tuple[int, ...] = field(default=(), repr=False)


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Optional[Fraction] = None
    witness: Optional[Witness] = None
    pivots: int = 0


# ---------------------------------------------------------------------------
# fraction-free revised simplex on  min c.y  s.t.  M y = b, y >= 0


class _Unbounded(Exception):
    pass


class _Simplex:
    """Revised simplex with an integer adjugate basis inverse.

    ``cols[j]`` is a sparse column ``[(row, int), ...]`` of ``M``.  Rows with a
    negative right-hand side are negated internally; ``row_sign`` records it.
    """

    def __init__(self, cols: list[list[tuple[int, int]]], b: Sequence[int], costs: Sequence[int],
                 order: Optional[Sequence[int]] = None):
        self.R = R = len(b)
        self.row_sign = [(-1 if v < 0 else 1) for v in b]
        if any(s < 0 for s in self.row_sign):
            cols = [[(i, v * self.row_sign[i]) for i, v in col] for col in cols]
        self.b = [abs(v) for v in b]
        self.cols = cols
        self.costs = list(costs)
        self.ncols = len(cols)
        # Bland order: position of each real column in the least-index ranking
        self.order = list(order) if order is not None else list(range(self.ncols))
        self.rank = {j: k for k, j in enumerate(self.order)}
        # artificial column R_i is ncols + i and ranks after every real column
        self.basis = [self.ncols + i for i in range(R)]
        self.adj = [[1 if i == k else 0 for k in range(R)] for i in range(R)]
        self.D = 1
        self.beta = list(self.b)
        self.pivots = 0

    def _key(self, j: int) -> int:
        return self.rank[j] if j < self.ncols else self.ncols + (j - self.ncols)

    def _alpha(self, j: int) -> list[int]:
        adj = self.adj
        if j >= self.ncols:
            k = j - self.ncols
            return [row[k] for row in adj]
        col = self.cols[j]
        return [sum(row[k] * v for k, v in col) for row in adj]

    def _multipliers(self, cb: Sequence[int]) -> list[int]:
        # pi * D  where pi = c_B^T B^{-1}
        R = self.R
        adj = self.adj
        pi = [0] * R
        for i in range(R):
            ci = cb[i]
            if ci:
                row = adj[i]
                for k in range(R):
                    if row[k]:
                        pi[k] += ci * row[k]
        return pi

    def _pivot(self, r: int, j: int, alpha: list[int]):
        D = self.D
        ar = alpha[r]
        adj = self.adj
        rowr = adj[r]
        br = self.beta[r]
        for i in range(self.R):
            if i == r:
                continue
            ai = alpha[i]
            row = adj[i]
            if ai:
                adj[i] = [(ar * x - ai * y) // D for x, y in zip(row, rowr)]
                self.beta[i] = (ar * self.beta[i] - ai * br) // D
            elif ar != D:
                adj[i] = [(ar * x) // D for x in row]
                self.beta[i] = (ar * self.beta[i]) // D
        self.D = ar
        self.basis[r] = j
        if self.D < 0:
            self.D = -self.D
            self.adj = [[-x for x in row] for row in self.adj]
            self.beta = [-x for x in self.beta]
        self.pivots += 1

    def _ratio(self, alpha: list[int]) -> Optional[int]:
        best = None
        for i, ai in enumerate(alpha):
            if ai <= 0:
                continue
            if best is None:
                best = i
                continue
            lhs = self.beta[i] * alpha[best]
            rhs = self.beta[best] * ai
            if lhs < rhs or (lhs == rhs and self._key(self.basis[i]) < self._key(self.basis[best])):
                best = i
        return best

    def _run(self, cost_of: Callable[[int], int], allow_artificial: bool,
             stop: Optional[Callable[[list[int], list[int]], bool]] = None) -> bool:
        """Iterate to optimality. Returns False if stopped early by ``stop``."""
        in_basis = set(self.basis)
        while True:
            cb = [cost_of(j) for j in self.basis]
            pi = self._multipliers(cb)
            D = self.D
            entering = None
            if stop is not None:
                red = [self.costs[j] * D - sum(pi[k] * v for k, v in self.cols[j]) for j in range(self.ncols)]
                if stop(pi, red):
                    return False
                for j in self.order:
                    if red[j] < 0 and j not in in_basis:
                        entering = j
                        break
            else:
                for j in self.order:
                    if j in in_basis:
                        continue
                    d = cost_of(j) * D - sum(pi[k] * v for k, v in self.cols[j])
                    if d < 0:
                        entering = j
                        break
            if entering is None and allow_artificial:
                for i in range(self.R):
                    j = self.ncols + i
                    if j in in_basis:
                        continue
                    if cost_of(j) * D - pi[i] < 0:
                        entering = j
                        break
            if entering is None:
                return True
            alpha = self._alpha(entering)
            r = self._ratio(alpha)
            if r is None:
                raise _Unbounded
            in_basis.discard(self.basis[r])
            self._pivot(r, entering, alpha)
            in_basis.add(entering)

    def phase1(self) -> bool:
        """Drive out artificials. Returns True iff ``M y = b, y >= 0`` is feasible."""
        n = self.ncols
        self._run(lambda j: 1 if j >= n else 0, allow_artificial=False)
        infeas = sum(self.beta[i] for i, j in enumerate(self.basis) if j >= n)
        if infeas > 0:
            return False
        # pivot zero-level artificials out where some real column allows it
        for i in range(self.R):
            if self.basis[i] < n:
                continue
            in_basis = set(self.basis)
            row = self.adj[i]
            for j in self.order:
                if j in in_basis:
                    continue
                if sum(row[k] * v for k, v in self.cols[j]) != 0:
                    self._pivot(i, j, self._alpha(j))
                    break
        return True

    def phase1_duals(self) -> list[Fraction]:
        """Phase-I multipliers in the original row signs (a Farkas certificate)."""
        n = self.ncols
        pi = self._multipliers([1 if j >= n else 0 for j in self.basis])
        return [Fraction(pi[k] * self.row_sign[k], self.D) for k in range(self.R)]

    def phase2(self, stop=None) -> bool:
        n = self.ncols
        costs = self.costs
        # artificials still basic sit on redundant rows at level zero
        return self._run(lambda j: costs[j] if j < n else 0, allow_artificial=False, stop=stop)

    def duals(self) -> list[Fraction]:
        n = self.ncols
        pi = self._multipliers([self.costs[j] if j < n else 0 for j in self.basis])
        return [Fraction(pi[k] * self.row_sign[k], self.D) for k in range(self.R)]

    def objective(self) -> Fraction:
        n = self.ncols
        tot = sum(self.costs[j] * self.beta[i] for i, j in enumerate(self.basis) if j < n)
        return Fraction(tot, self.D)


def _integer_rows(S: LinearSystem, weights: Optional[Sequence[Fraction]] = None):
    """Scale each row (and its weight) by the lcm of its denominators."""
    out = []
    for i, (row, rhs) in enumerate(zip(S.rows, S.rhs)):
        w = Fraction(weights[i]) if weights is not None else Fraction(1)
        den = rhs.denominator * w.denominator
        for v in row:
            if v:
                den = math.lcm(den, v.denominator)
        den = math.lcm(den, rhs.denominator, w.denominator)
        coeffs = [(k, int(v * den)) for k, v in enumerate(row) if v]
        out.append((coeffs, int(rhs * den), int(w * den)))
    return out


def _margin_simplex(S: LinearSystem, weights=None, hint: Sequence[int] = ()):
    n = S.n
    irows = _integer_rows(S, weights)
    cols = [coeffs + [(n, w)] if w else list(coeffs) for coeffs, _, w in irows]
    costs = [c for _, c, _ in irows]
    b = [0] * n + [1]
    order = None
    if hint:
        seen = set()
        order = [i for i in hint if not (i in seen or seen.add(i))]
        order += [i for i in range(len(cols)) if i not in seen]
    return _Simplex(cols, b, costs, order), irows


def _witness_is_valid(irows, x_num: list[int], den: int) -> bool:
    for coeffs, c, _ in irows:
        if sum(v * x_num[k] for k, v in coeffs) > c * den:
            return False
    return True


def feasible_exact(S: LinearSystem, hint: Sequence[int] = ()) -> FeasReport:
    """Decide ``{x : A x <= c} != {}`` exactly.

    ``hint`` lists row indices that the simplex should consider first when
    choosing entering columns (e.g. the active rows reported by the float
    solver). It changes the pivot order, never the verdict.
    """
    n = S.n
    if S.m == 0:
        return FeasReport(True, Witness((Fraction(0),) * n), 0, "exact")
    simplex, irows = _margin_simplex(S, None, hint)

    if not simplex.phase1():
        # no convex combination of rows vanishes: some direction r has A r < 0
        pi = simplex.phase1_duals()
        r, rho = pi[:n], pi[n]
        t = Fraction(0)
        for coeffs, c, w in irows:
            # row . r <= -rho * w  (scaled); need row . (t r) <= c
            if c < 0:
                t = max(t, Fraction(-c, 1) / (rho * w))
        x = tuple(t * v for v in r)
        return FeasReport(True, Witness(x), simplex.pivots, "exact")

    found: list = []

    def stop(pi, red):
        D = simplex.D
        # multipliers live in possibly-negated row space
        sign = simplex.row_sign
        x_num = [pi[k] * sign[k] for k in range(n)]
        if _witness_is_valid(irows, x_num, D):
            found.append((x_num, D))
            return True
        return False

    simplex.phase2(stop=stop)
    if found:
        x_num, D = found[0]
        return FeasReport(True, Witness(tuple(Fraction(v, D) for v in x_num)), simplex.pivots, "exact")
    # optimal margin is negative
    return FeasReport(False, None, simplex.pivots, "exact")


def max_margin(S: LinearSystem, weights: Sequence[Fraction]) -> LPResult:
    """Maximize ``s`` subject to ``A x + s w <= c``; ``w`` must be positive.

    The witness holds ``x`` followed by ``s``.
    """
    n = S.n
    if any(Fraction(w) <= 0 for w in weights):
        raise ValueError("margin weights must be positive")
    simplex, _ = _margin_simplex(S, weights)
    if not simplex.phase1():
        return LPResult("unbounded", pivots=simplex.pivots)
    simplex.phase2()
    pi = simplex.duals()
    value = pi[n]
    return LPResult("optimal", value, Witness(tuple(pi[:n]) + (value,)), simplex.pivots)


def maximize(S: LinearSystem, objective: Sequence) -> LPResult:
    """Exact ``max objective.x`` over ``A x <= c``."""
    n = S.n
    obj = [Fraction(v) for v in objective]
    if len(obj) != n:
        raise DimensionMismatch("objective length does not match column count")
    if S.m == 0:
        if any(obj):
            return LPResult("unbounded")
        return LPResult("optimal", Fraction(0), Witness((Fraction(0),) * n))
    irows = _integer_rows(S)
    den = 1
    for v in obj:
        den = math.lcm(den, v.denominator)
    b = [int(v * den) for v in obj]
    cols = [list(coeffs) for coeffs, _, _ in irows]
    costs = [c for _, c, _ in irows]
    simplex = _Simplex(cols, b, costs)
    if not simplex.phase1():
        if feasible_exact(S).feasible:
            return LPResult("unbounded", pivots=simplex.pivots)
        return LPResult("infeasible", pivots=simplex.pivots)
    try:
        simplex.phase2()
    except _Unbounded:
        return LPResult("infeasible", pivots=simplex.pivots)
    x = tuple(simplex.duals())
    value = sum((o * v for o, v in zip(obj, x)), Fraction(0))
    return LPResult("optimal", value, Witness(x), simplex.pivots)


def check_witness(S: LinearSystem, w) -> bool:
    """Substitute ``w`` into every row; no solver state is consulted."""
    values = w.values if isinstance(w, Witness) else tuple(w)
    if len(values) != S.n:
        raise DimensionMismatch(f"witness has {len(values)} values, system has {S.n} columns")
    values = [Fraction(v) for v in values]
    for row, rhs in zip(S.rows, S.rhs):
        lhs = Fraction(0)
        for a, x in zip(row, values):
            if a:
                lhs += a * x
        if lhs > rhs:
            return False
    return True


def feasible_float_arrays(A, c, tol: float = FLOAT_TOLERANCE) -> FeasReport:
    """Float max-margin prescreen on dense or sparse ``A``.

    The verdict is advisory. ``active`` lists rows carrying dual weight, which
    :func:`feasible_exact` accepts as a pivoting hint.
    """
    from scipy.optimize import linprog
    from scipy import sparse

    m, n = A.shape
    if sparse.issparse(A):
        A_ub = sparse.hstack([A, sparse.csr_matrix(np.ones((m, 1)))], format="csr")
    else:
        A_ub = np.hstack([A, np.ones((m, 1))])
    cost = np.zeros(n + 1)
    cost[-1] = -1.0
    bounds = [(None, None)] * n + [(None, 1.0)]
    try:
        res = linprog(cost, A_ub=A_ub, b_ub=c, bounds=bounds, method="highs")
    except (ValueError, np.linalg.LinAlgError) as exc:  # pragma: no cover - solver internals
        raise NumericalFailure(str(exc)) from exc
    if res.status not in (0,):
        raise NumericalFailure(res.message)
    margin = -float(res.fun)
    duals = getattr(res, "ineqlin", None)
    active: tuple[int, ...] = ()
    if duals is not None and duals.marginals is not None:
        marg = np.abs(np.asarray(duals.marginals))
        idx = np.nonzero(marg > 1e-12)[0]
        active = tuple(int(i) for i in idx[np.argsort(-marg[idx], kind="stable")])
    return FeasReport(margin >= -tol, None, int(getattr(res, "nit", 0)), "float-prescreen", margin, active)


def feasible_float(S: LinearSystem, tol: float = FLOAT_TOLERANCE) -> FeasReport:
    A, c = S.to_float()
    return feasible_float_arrays(A, c, tol)
