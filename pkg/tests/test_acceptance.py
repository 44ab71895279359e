"""Acceptance criteria, one test each, every test printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` or directly with
``python3 tests/test_acceptance.py``.  The lines are also repeated in the
pytest terminal summary.
"""
from __future__ import annotations

import itertools
import os
import random
import subprocess
import sys
import time
from pathlib import Path

import pytest

from cubecover import certify, search
from cubecover.config import box_from_indices, count_boxes, q_polytope
from cubecover.cover import FACE_EDGES, FACES, build_lp, covering_row_count, enumerate_taus, lower_bound_pairs
from cubecover.properties import run_suites

RESULTS: list[str] = []
RELEASED_ENV = "CUBECOVER_RELEASED"
RELEASED_DEFAULT = Path(__file__).parent / "data" / "released"


def report(n: int, ok: bool, detail: str, seconds: float, limit: float | None = None) -> None:
    within = limit is None or seconds <= limit
    status = "PASS" if ok and within else "FAIL"
    budget = f" (limit {limit:g}s)" if limit is not None else ""
    line = f"{status} criterion {n:2d}: {detail} [{seconds:.1f}s{budget}]"
    RESULTS.append(line)
    print(line)
    assert ok, line
    assert within, line


def test_01_box_enumeration():
    t0 = time.perf_counter()
    r = subprocess.run([sys.executable, "-m", "cubecover.cli", "enumerate", "--M", "10", "--count-only"],
                       capture_output=True, text=True)
    dt = time.perf_counter() - t0
    got = r.stdout.strip()
    report(1, r.returncode == 0 and got == "1882010", f"enumerate --M 10 --count-only printed {got}", dt, 60)


def test_02_tau_enumeration():
    t0 = time.perf_counter()
    taus = enumerate_taus(True)
    brute = sum(1 for t in itertools.product(range(4), repeat=6)
                if len({FACE_EDGES[f][i] for f, i in zip(FACES, t)}) == 6)
    dt = time.perf_counter() - t0
    report(2, len(taus) == 1496 == brute, f"{len(taus)} restricted maps, brute-force filter {brute}", dt, 1)


def test_03_system_shape():
    rng = random.Random(3)
    taus = enumerate_taus(True)
    t0 = time.perf_counter()
    bad = []
    qs = set()
    for _ in range(100):
        P = box_from_indices(search.random_grid_index(10, rng), 10)
        Q = q_polytope(P)
        S = build_lp(P, rng.choice(taus), Q)
        qs.add(Q.q)
        if not (S.n == 60 and covering_row_count(Q.q) == 68 * Q.q and S.m == 68 * Q.q + 36):
            bad.append((P, Q.q, S.n, S.m))
    dt = time.perf_counter() - t0
    report(3, not bad, f"100 boxes: 60 columns and 68q+36 rows (q in {sorted(qs)}), {len(bad)} mismatches", dt, 300)


def _released_path() -> Path | None:
    p = Path(os.environ.get(RELEASED_ENV, RELEASED_DEFAULT))
    return p if p.exists() else None


def test_04_released_pairs_feasible():
    from cubecover.released import ImportOptions, import_paths

    src = _released_path()
    if src is None:
        report(4, False, f"released dataset not found (set {RELEASED_ENV}); no pairs verified", 0.0)
    opts = ImportOptions(
        box_layout=os.environ.get("CUBECOVER_RELEASED_LAYOUT", "lohi"),
        scale=int(os.environ.get("CUBECOVER_RELEASED_SCALE", "1")),
        tau_base=int(os.environ.get("CUBECOVER_RELEASED_TAU_BASE", "0")),
    )
    t0 = time.perf_counter()
    rep = import_paths([src], opts, limit=100)
    dt = time.perf_counter() - t0
    n = len(rep.entries)
    ok = n >= 100 and not rep.infeasible and all(certify.check_entry(e) for e in rep.entries)
    per_box = dt / max(1, n + len(rep.infeasible))
    report(4, ok and per_box <= 10, f"{n} imported pairs feasible, {len(rep.infeasible)} not, "
           f"{per_box:.2f}s per box", dt)


def test_05_lower_bound():
    t0 = time.perf_counter()
    pairs = lower_bound_pairs()
    dt = time.perf_counter() - t0
    tight = sum(p.closed_feasible for p in pairs)
    ok = len(pairs) == 91 and all(p.open_infeasible for p in pairs)
    report(5, ok, f"{len(pairs)} pairs, none with positive margin ({tight} boundary-tight in the closed sense)",
           dt, 120)


def _suite(n: int, name: str, trials, limit=None, seed: int = 2024):
    t0 = time.perf_counter()
    rep = run_suites([name], seed=seed, trials=trials)[0]
    dt = time.perf_counter() - t0
    detail = f"{name}: {rep.trials} trials, {len(rep.failures)} failures"
    if rep.failures:
        detail += f"; first: {rep.failures[0]}"
    report(n, rep.passed, detail, dt, limit)


def test_06_lemma_inclusion():
    _suite(6, "lemma-inclusion", 1000, 1800)


def test_07_lemma_strict_translate():
    _suite(7, "lemma-strict", 100)


def test_08_segment_fact():
    _suite(8, "segment", 100)


def test_09_symmetry():
    from cubecover.properties import suite_symmetry

    t0 = time.perf_counter()
    rep = suite_symmetry(random.Random("2024:symmetry"))
    dt = time.perf_counter() - t0
    reduce_fail = sum("into D" in f or "reduce_to_D" in f or "mismatch" in f for f in rep.failures)
    cover_fail = len(rep.failures) - reduce_fail
    detail = (f"{reduce_fail}/1000 random p without an image in D; "
              f"{cover_fail}/30000 points of D outside the M=1,2,10 grids")
    report(9, rep.passed, detail, dt)


def test_10_geometry_oracle():
    _suite(10, "hull-oracle", 500)


def test_11_lp_oracle():
    _suite(11, "lp-oracle", 500)


E2E_REGION = 0
E2E_SHARD = (0, 14)


def test_12_end_to_end(tmp_path):
    workers = search.default_workers()
    cfg = search.SearchConfig(M=10, shard=E2E_SHARD)
    starts = certify.shard_starts(10, E2E_REGION, E2E_SHARD)
    t0 = time.perf_counter()
    res = search.search_region(E2E_REGION, cfg, out_dir=tmp_path)
    cf = certify.read_certificates(tmp_path / f"{search.run_name(E2E_REGION, E2E_SHARD)}.cert")
    bad = [e for e in cf.entries if not certify.check_entry(e)]
    tiling = certify.check_tiling(cf.entries, 10, starts)
    dt = time.perf_counter() - t0
    ok = bool(starts) and len(starts) <= 500 and not res.unresolved and not bad and bool(tiling)
    detail = (f"region {E2E_REGION} shard {E2E_SHARD[0]}/{E2E_SHARD[1]}: {len(starts)} starting boxes, "
              f"{len(cf.entries)} entries, {len(res.unresolved)} unresolved, {len(bad)} rejected, "
              f"tiling {'ok' if tiling else tiling.problem}; {workers} worker(s)")
    report(12, ok, detail, dt, 7200)


def test_13_sharded_full_run_plan():
    n = 10
    t0 = time.perf_counter()
    plan = certify.shard_plan(10, n)
    total = sum(plan.values())
    cfgs = [search.SearchConfig(M=10, shard=(i, n)) for i in range(n)]
    names = {search.run_name(r, (i, n)) for r, i in plan}
    sample_ok = all(len(certify.shard_starts(10, r, (i, n))) == plan[(r, i)] for r, i in [(0, 0), (0, 9)])
    dt = time.perf_counter() - t0
    ok = total == count_boxes(10) == 1882010 and len(names) == len(plan) and len(cfgs) == n and sample_ok
    report(13, ok, f"{len(plan)} (region, shard) runs with {n} shards per region cover {total} starting boxes; "
           "full run not attempted", dt)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
