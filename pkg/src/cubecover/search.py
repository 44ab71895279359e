"""Adaptive subdivision search for (box, tau) pairs with exact witnesses."""
from __future__ import annotations

import json
import logging
import os
import random
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from .certify import (
    CertificateEntry,
    CertificateFile,
    format_entry,
    parse_entry,
    shard_starts,
    write_certificates,
)
from .config import Box6, box_from_indices, index_in_grid
from .cover import FloatCover, TauMap, enumerate_taus, is_restricted, verify_with_q
from .geometry import GeometryError
from .config import q_polytope

log = logging.getLogger(__name__)

SHORTLIST_SIZE = 16


class MaxDepthExceeded(Exception):
    def __init__(self, box: Box6, depth: int):
        self.box = box
        self.depth = depth
        super().__init__(f"box {box.lo}..{box.hi} still unresolved at depth {depth}")


@dataclass
class SearchConfig:
    M: int = 10
    max_depth: int = 12
    prescreen: bool = True
    seed: int = 0
    shard: tuple[int, int] = (0, 1)

    def __post_init__(self):
        if self.max_depth < 7:
            raise ValueError("max_depth must be at least 7")
        i, n = self.shard
        if not 0 <= i < n:
            raise ValueError(f"shard index {i} not below shard total {n}")


@dataclass
class Unresolved:
    box: Box6
    depth: int
    reason: str


@dataclass
class SearchResult:
    entries: list[CertificateEntry] = field(default_factory=list)
    unresolved: list[Unresolved] = field(default_factory=list)
    box_stats: list[dict] = field(default_factory=list)

    def extend(self, other: "SearchResult"):
        self.entries += other.entries
        self.unresolved += other.unresolved
        self.box_stats += other.box_stats


def split(P: Box6) -> tuple[Box6, Box6]:
    """Bisect along the widest coordinate, lowest index on ties."""
    widths = P.widths
    i = widths.index(max(widths))
    mid = (P.lo[i] + P.hi[i]) / 2
    lower = Box6(P.lo, P.hi[:i] + (mid,) + P.hi[i + 1:], P.region_id)
    upper = Box6(P.lo[:i] + (mid,) + P.lo[i + 1:], P.hi, P.region_id)
    return lower, upper


class LongList:
    """All restricted maps in a mutable order with move-to-front."""

    def __init__(self, taus: Optional[Sequence[TauMap]] = None):
        self.items: list[TauMap] = list(taus) if taus is not None else enumerate_taus(True)

    def move_to_front(self, idx: int):
        self.items.insert(0, self.items.pop(idx))

    def __iter__(self):
        return iter(self.items)

    def __len__(self):
        return len(self.items)


def _find_tau(P: Box6, Q, short: Sequence[TauMap], long: LongList, cfg: SearchConfig, st: dict):
    fc = FloatCover(P, Q) if cfg.prescreen else None
    tried = set()
    for tau in short:
        tried.add(tau)
        st["taus_tried"] += 1
        v = verify_with_q(P, tau, Q, cfg.prescreen, fc)
        st["pivots"] += v.pivots if v.detail == "exact" else 0
        if v.feasible:
            return tau, v
    for idx, tau in enumerate(long.items):
        if tau in tried:
            continue
        st["taus_tried"] += 1
        v = verify_with_q(P, tau, Q, cfg.prescreen, fc)
        st["pivots"] += v.pivots if v.detail == "exact" else 0
        if v.feasible:
            long.move_to_front(idx)
            return tau, v
    return None, None


def search_box(P: Box6, short: Sequence[TauMap], long: LongList, cfg: SearchConfig,
               depth: int = 0) -> SearchResult:
    """Find entries whose boxes tile ``P``; unresolved sub-boxes are reported, not dropped."""
    t0 = time.perf_counter()
    res = SearchResult()
    st = {"taus_tried": 0, "pivots": 0}
    max_seen = depth
    stack = [(P, depth)]
    while stack:
        B, d = stack.pop()
        max_seen = max(max_seen, d)
        try:
            Q = q_polytope(B)
        except GeometryError as exc:
            res.unresolved.append(Unresolved(B, d, f"geometry: {exc}"))
            continue
        tau, v = _find_tau(B, Q, short, long, cfg, st)
        if tau is not None:
            res.entries.append(CertificateEntry(B.without_region(), tuple(tau), v.witness.values))
            continue
        if d >= cfg.max_depth:
            res.unresolved.append(Unresolved(B, d, "max depth"))
            continue
        lo, hi = split(B)
        stack.append((hi, d + 1))
        stack.append((lo, d + 1))
    res.box_stats.append({
        "box": P,
        "leaves": len(res.entries),
        "max_depth": max_seen,
        "taus_tried": st["taus_tried"],
        "pivots": st["pivots"],
        "unresolved": len(res.unresolved),
        "seconds": time.perf_counter() - t0,
    })
    return res


# --------------------------------------------------------------------------
# short list


def _shortlist_resource():
    return resources.files("cubecover").joinpath("data/shortlist.txt")


def load_shortlist(path=None) -> list[TauMap]:
    text = Path(path).read_text() if path else _shortlist_resource().read_text()
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        tau = tuple(int(t) for t in line.split())
        if not is_restricted(tau) or len(set(tau)) != 6:
            raise ValueError(f"short-list entry {tau} is not a restricted injective map")
        out.append(tau)
    if len(out) > SHORTLIST_SIZE:
        raise ValueError(f"short list has {len(out)} entries, at most {SHORTLIST_SIZE} allowed")
    return out


def random_grid_index(M: int, rng: random.Random) -> tuple[int, ...]:
    while True:
        k = tuple(rng.randrange(M) for _ in range(3)) + tuple(rng.randrange(2 * M) for _ in range(3))
        if index_in_grid(k, M):
            return k


def bootstrap_shortlist(samples: int, seed: int = 0, M: int = 10) -> list[TauMap]:
    """The 16 maps that pass the float screen most often on random grid boxes.

    Only the selection heuristic uses float verdicts; every map it picks is
    still confirmed exactly when the search uses it.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    from . import lp

    rng = random.Random(seed)
    taus = enumerate_taus(True)
    tally = {t: 0 for t in taus}
    for _ in range(samples):
        P = box_from_indices(random_grid_index(M, rng), M)
        try:
            Q = q_polytope(P)
        except GeometryError:
            continue
        fc = FloatCover(P, Q)
        for tau in taus:
            A, c = fc.arrays(tau)
            try:
                if lp.feasible_float_arrays(A, c).feasible:
                    tally[tau] += 1
            except lp.NumericalFailure:
                pass
    ranked = sorted(taus, key=lambda t: -tally[t])
    return [t for t in ranked[:SHORTLIST_SIZE] if tally[t] > 0]


# --------------------------------------------------------------------------
# region runs with checkpointing


def run_name(region: Optional[int], shard: tuple[int, int]) -> str:
    r = "custom" if region is None else f"{region:03d}"
    return f"region{r}_shard{shard[0]}of{shard[1]}"


def _write_json(path: Path, obj):
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(json.dumps(obj, sort_keys=True))
    tmp.replace(path)


def _stats_row(s: dict) -> dict:
    out = dict(s)
    b = out.pop("box")
    out["box"] = " ".join(f"{v.numerator}/{v.denominator}" for v in b.lo + b.hi)
    return out


def search_starts(starts: Sequence[tuple[int, ...]], cfg: SearchConfig, short: Sequence[TauMap],
                  out_dir=None, region: Optional[int] = None, resume: bool = False,
                  long_order: Optional[Sequence[TauMap]] = None) -> SearchResult:
    """Process grid boxes in order, one long list for the whole run.

    With ``out_dir`` every finished starting box is appended to a partial file
    and the checkpoint is rewritten, so an interrupted run resumes where it
    stopped and produces the same certificate.
    """
    long = LongList(long_order)
    total = SearchResult()
    done = 0
    ckpt = partial = None
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        name = run_name(region, cfg.shard)
        ckpt = out_dir / f"{name}.ckpt"
        partial = out_dir / f"{name}.partial"
        if resume and ckpt.exists():
            state = json.loads(ckpt.read_text())
            if state["M"] != cfg.M or tuple(state["shard"]) != tuple(cfg.shard) or state["region"] != region:
                raise ValueError(f"checkpoint {ckpt} belongs to a different run")
            done = state["processed"]
            long = LongList([tuple(t) for t in state["long_order"]])
            lines = partial.read_text().splitlines()[: state["entries"]] if partial.exists() else []
            total.entries = [parse_entry(t) for t in lines]
            total.unresolved = [
                Unresolved(Box6.make(u["lo"], u["hi"]), u["depth"], u["reason"]) for u in state["unresolved"]
            ]
            total.box_stats = state.get("box_stats", [])
            partial.write_text("".join(l + "\n" for l in lines))
        else:
            partial.write_text("")
    for pos in range(done, len(starts)):
        P = box_from_indices(starts[pos], cfg.M)
        r = search_box(P, short, long, cfg)
        total.entries += r.entries
        total.unresolved += r.unresolved
        total.box_stats += [_stats_row(s) for s in r.box_stats]
        if out_dir is not None:
            with partial.open("a") as fh:
                for e in r.entries:
                    fh.write(format_entry(e) + "\n")
            _write_json(ckpt, {
                "M": cfg.M,
                "region": region,
                "shard": list(cfg.shard),
                "processed": pos + 1,
                "entries": len(total.entries),
                "long_order": [list(t) for t in long.items],
                "unresolved": [
                    {"lo": [str(v) for v in u.box.lo], "hi": [str(v) for v in u.box.hi],
                     "depth": u.depth, "reason": u.reason}
                    for u in total.unresolved
                ],
                "box_stats": total.box_stats,
                "done": pos + 1 == len(starts),
            })
        log.info("start box %d/%d: %d leaves, %d unresolved", pos + 1, len(starts),
                 len(r.entries), len(r.unresolved))
    total.entries.sort(key=lambda e: e.box.key())
    if out_dir is not None:
        cf = CertificateFile(cfg.M, region, cfg.shard, total.entries)
        write_certificates(cf, out_dir / f"{name}.cert")
        _write_json(out_dir / f"{name}.stats.json", {
            "box_stats": total.box_stats,
            "unresolved": len(total.unresolved),
        })
    return total


def search_region(region_id: int, cfg: SearchConfig, short: Optional[Sequence[TauMap]] = None,
                  out_dir=None, resume: bool = False, limit: Optional[int] = None) -> SearchResult:
    """Every grid box of one region that falls in this run's shard."""
    if not 0 <= region_id < 512:
        raise ValueError(f"region id {region_id} outside 0..511")
    short = load_shortlist() if short is None else short
    starts = shard_starts(cfg.M, region_id, cfg.shard)
    if limit is not None:
        starts = starts[:limit]
    return search_starts(starts, cfg, short, out_dir, region_id, resume)


def default_workers() -> int:
    env = os.environ.get("CUBECOVER_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _region_task(args):
    region_id, cfg, short, out_dir, resume, limit = args
    r = search_region(region_id, cfg, short, out_dir, resume, limit)
    return region_id, len(r.entries), len(r.unresolved)


def run_regions(region_ids: Sequence[int], cfg: SearchConfig, short, out_dir, resume=False,
                workers: int = 1, limit: Optional[int] = None) -> list[tuple[int, int, int]]:
    """One task per region; results come back sorted by region id."""
    tasks = [(r, cfg, list(short), out_dir, resume, limit) for r in region_ids]
    if workers <= 1 or len(tasks) <= 1:
        return sorted(_region_task(t) for t in tasks)
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=workers) as ex:
        return sorted(ex.map(_region_task, tasks))
