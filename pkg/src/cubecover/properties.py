"""Randomized property suites shared by the CLI and the test-suite.

Every suite takes a ``random.Random`` so a fixed seed reproduces the report
line for line.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import lp, oracles
from .config import (
    Box6,
    NotReducible,
    box_from_indices,
    containing_indices,
    in_D,
    index_in_grid,
    reduce_to_D,
    v_points,
)
from .cover import inclusion_check, lower_bound_pairs, segment_fact_check, strict_translate
from .geometry import DegenerateHull, hull3, vertices
from .search import random_grid_index, split


@dataclass
class SuiteReport:
    name: str
    trials: int = 0
    failures: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures and self.trials > 0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.trials} trials, {len(self.failures)} failures"


def rand_rational(rng: random.Random, lo=0, hi=1, max_den: int = 20) -> Fraction:
    den = rng.randint(1, max_den)
    a = Fraction(lo) * den
    b = Fraction(hi) * den
    num = rng.randint(int(-(-a // 1)), int(b // 1))
    return Fraction(num, den)


def rand_config(rng, max_den=20):
    return tuple(rand_rational(rng, 0, 1, max_den) for _ in range(6))


def random_descendant(rng: random.Random, M: int = 10, max_splits: int = 7) -> Box6:
    P = box_from_indices(random_grid_index(M, rng), M)
    for _ in range(rng.randint(0, max_splits)):
        P = split(P)[rng.randint(0, 1)]
    return P


def random_point_in(rng: random.Random, P: Box6, interior: bool = False, max_den: int = 16) -> tuple:
    out = []
    for a, b in zip(P.lo, P.hi):
        den = rng.randint(2, max_den)
        k = rng.randint(1, den - 1) if interior else rng.randint(0, den)
        out.append(a + (b - a) * Fraction(k, den))
    return tuple(out)


def suite_lower_bound(rng=None, trials=None) -> SuiteReport:
    rep = SuiteReport("lower-bound")
    for pv in lower_bound_pairs():
        rep.trials += 1
        rep.notes.append(
            f"{pv.x} {pv.y} closed={'feasible' if pv.closed_feasible else 'infeasible'} margin={pv.margin}"
        )
        if not pv.open_infeasible:
            rep.failures.append(f"pair {pv.x} {pv.y} fits in an open translate (margin {pv.margin})")
    if rep.trials != 91:
        rep.failures.append(f"expected 91 pairs, got {rep.trials}")
    return rep


def suite_lemma_inclusion(rng, trials=1000) -> SuiteReport:
    rep = SuiteReport("lemma-inclusion")
    for _ in range(trials):
        P = random_descendant(rng)
        p = random_point_in(rng, P)
        rep.trials += 1
        if not inclusion_check(P, p):
            rep.failures.append(f"Q_P not inside O_p for P={P.lo}..{P.hi}, p={p}")
    return rep


def suite_lemma_strict(rng, trials=100) -> SuiteReport:
    rep = SuiteReport("lemma-strict-translate")
    for _ in range(trials):
        P = random_descendant(rng)
        p = random_point_in(rng, P, interior=True)
        rep.trials += 1
        try:
            st = strict_translate(P, p)
            rep.notes.append(f"margin {st.margin}")
        except AssertionError as exc:
            rep.failures.append(str(exc))
    return rep


def suite_segment(rng, trials=100, samples=20) -> SuiteReport:
    rep = SuiteReport("segment-fact")
    for _ in range(trials):
        q = list(rand_config(rng, 16))
        axis = rng.randrange(6)
        r = list(q)
        r[axis] = rand_rational(rng, 0, 1, 16)
        lam = Fraction(rng.randint(0, 8), 8)
        p = list(q)
        p[axis] = q[axis] + lam * (r[axis] - q[axis])
        rep.trials += 1
        try:
            ok = segment_fact_check(q, r, p, samples, rng)
        except Exception as exc:  # geometry errors are reported as failures
            ok = False
            rep.notes.append(f"{type(exc).__name__}: {exc}")
        if not ok:
            rep.failures.append(f"q={q} r={r} p={p}")
    return rep


def random_point_in_D(rng: random.Random, max_den: int = 20) -> tuple:
    """Rejection sample of a rational point of the grid domain, boundary included."""
    while True:
        p = tuple(rand_rational(rng, 0, Fraction(1, 2), max_den) for _ in range(3)) + tuple(
            rand_rational(rng, 0, 1, max_den) for _ in range(3)
        )
        if in_D(p):
            return p


def suite_symmetry(rng, trials=1000, cover_trials=10000, Ms=(1, 2, 10)) -> SuiteReport:
    rep = SuiteReport("symmetry")
    for _ in range(trials):
        p = rand_config(rng)
        rep.trials += 1
        try:
            img, s = reduce_to_D(p)
        except NotReducible as exc:
            rep.failures.append(str(exc))
            continue
        if not in_D(img):
            rep.failures.append(f"reduce_to_D({p}) = {img} not in D")
        if set(v_points(img)) != {s.apply_point(x) for x in v_points(p)}:
            rep.failures.append(f"symmetry image mismatch for {p}")
    for M in Ms:
        for _ in range(cover_trials):
            p = random_point_in_D(rng)
            k = containing_indices(p, M)
            rep.trials += 1
            if not (index_in_grid(k, M) and box_from_indices(k, M).contains(p)):
                rep.failures.append(f"p={p} not covered by the M={M} grid (k={k})")
    return rep


def suite_hull_oracle(rng, trials=500) -> SuiteReport:
    rep = SuiteReport("hull-oracle")
    done = 0
    while done < trials:
        grid = rng.choice((4, 6, 20))
        pts = [tuple(Fraction(rng.randint(0, grid), grid) for _ in range(3)) for _ in range(6)]
        try:
            H = hull3(pts)
        except DegenerateHull:
            if oracles._rank([[b - a for a, b in zip(pts[0], p)] for p in pts]) >= 3:
                rep.failures.append(f"spurious DegenerateHull for {pts}")
            continue
        done += 1
        rep.trials += 1
        got = {(h.normal, h.offset) for h in H.halfspaces}
        if got != oracles.facet_oracle(pts):
            rep.failures.append(f"facet mismatch for {pts}")
            continue
        if set(vertices(H).vertices) != oracles.extreme_points(pts):
            rep.failures.append(f"vertex round-trip mismatch for {pts}")
    return rep


def random_small_system(rng, n_max=4, m_max=8):
    n = rng.randint(1, n_max)
    m = rng.randint(1, m_max)
    A = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(m)]
    c = [rng.randint(-3, 3) for _ in range(m)]
    return A, c


def suite_lp_oracle(rng, trials=500) -> SuiteReport:
    rep = SuiteReport("lp-oracle")
    for _ in range(trials):
        A, c = random_small_system(rng)
        S = lp.LinearSystem.build(A, c)
        rep.trials += 1
        got = lp.feasible_exact(S)
        want = oracles.lp_feasible_oracle(A, c)
        if got.feasible != want:
            rep.failures.append(f"verdict {got.feasible} vs oracle {want} for A={A} c={c}")
        elif got.feasible and not lp.check_witness(S, got.witness):
            rep.failures.append(f"witness rejected for A={A} c={c}")
    return rep


SUITES: dict[str, Callable] = {
    "lower-bound": suite_lower_bound,
    "lemma-inclusion": suite_lemma_inclusion,
    "lemma-strict": suite_lemma_strict,
    "segment": suite_segment,
    "symmetry": suite_symmetry,
    "hull-oracle": suite_hull_oracle,
    "lp-oracle": suite_lp_oracle,
}


def run_suites(names, seed: int = 0, trials=None) -> list[SuiteReport]:
    out = []
    for name in names:
        rng = random.Random(f"{seed}:{name}")
        fn = SUITES[name]
        out.append(fn(rng) if trials is None else fn(rng, trials))
    return out
