"""Certificate files and their independent re-verification.

An entry line reads::

    box: lo1 .. lo6 hi1 .. hi6 | tau: k1 .. k6 | witness: w1 .. w60

with every rational written ``num/den`` in lowest terms.  Checking an entry
rebuilds the covering polytope from the box, substitutes the stored witness
into the rows and re-checks the covering statements by point membership.  No
LP solver is involved.
"""
from __future__ import annotations

import math
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, Optional, Sequence

from . import lp
from .config import Box6, box_from_indices, box_indices, index_in_grid, o_polytope, q_polytope, region_of_indices
from .cover import N_VARS, build_lp, is_injective, witness_covers
from .geometry import GeometryError, contains, vertices

FORMAT_VERSION = 1
MAGIC = "cubecover-certificate"


class ParseError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class VersionMismatch(ParseError):
    pass


class BoxGeometryError(Exception):
    pass


@dataclass(frozen=True)
class CertificateEntry:
    box: Box6
    tau: tuple[int, ...]
    witness: tuple[Fraction, ...]


@dataclass
class CertificateFile:
    M: int
    region: Optional[int]
    shard: tuple[int, int] = (0, 1)
    entries: list[CertificateEntry] = field(default_factory=list)
    version: int = FORMAT_VERSION


# --------------------------------------------------------------------------
# serialization

_RAT = re.compile(r"^(-?\d+)/(\d+)$")


def fmt_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def parse_rational(tok: str, line: Optional[int] = None) -> Fraction:
    m = _RAT.match(tok)
    if not m:
        raise ParseError(f"malformed rational {tok!r}", line)
    num, den = int(m.group(1)), int(m.group(2))
    if den == 0:
        raise ParseError(f"zero denominator in {tok!r}", line)
    if math.gcd(num, den) != 1:
        raise ParseError(f"rational {tok!r} is not in lowest terms", line)
    return Fraction(num, den)


def format_box(box: Box6) -> str:
    return " ".join(fmt_rational(v) for v in box.lo + box.hi)


def parse_box(text: str, line: Optional[int] = None) -> Box6:
    toks = text.split()
    if len(toks) != 12:
        raise ParseError(f"box needs 12 rational fields, got {len(toks)}", line)
    vals = [parse_rational(t, line) for t in toks]
    lo, hi = tuple(vals[:6]), tuple(vals[6:])
    for a, b in zip(lo, hi):
        if not (0 <= a < b <= 1):
            raise ParseError(f"box interval [{a}, {b}] outside 0 <= lo < hi <= 1", line)
    return Box6(lo, hi)


def format_entry(e: CertificateEntry) -> str:
    return (
        "box: " + format_box(e.box)
        + " | tau: " + " ".join(str(k) for k in e.tau)
        + " | witness: " + " ".join(fmt_rational(v) for v in e.witness)
    )


def _starting_index(box: Box6, M: int) -> Optional[tuple[int, ...]]:
    """Grid index of the starting box ``box`` descends from by bisection, if any."""
    h = Fraction(1, 2 * M)
    k = []
    for a, b in zip(box.lo, box.hi):
        w = b - a
        ratio = h / w
        if ratio.denominator != 1 or ratio.numerator & (ratio.numerator - 1):
            return None
        if (a / w).denominator != 1:
            return None
        k.append(int(a // h))
    return tuple(k)


def parse_entry(text: str, M: Optional[int] = None, line: Optional[int] = None) -> CertificateEntry:
    parts = [p.strip() for p in text.split("|")]
    if len(parts) != 3:
        raise ParseError("entry needs box, tau and witness sections", line)
    labels = ("box:", "tau:", "witness:")
    for p, lab in zip(parts, labels):
        if not p.startswith(lab):
            raise ParseError(f"expected section {lab!r}", line)
    box = parse_box(parts[0][4:], line)
    tau_toks = parts[1][4:].split()
    if len(tau_toks) != 6 or not all(re.fullmatch(r"\d+", t) for t in tau_toks):
        raise ParseError("tau needs 6 edge indices", line)
    tau = tuple(int(t) for t in tau_toks)
    if any(k > 11 for k in tau):
        raise ParseError(f"edge index out of range in tau {tau}", line)
    if not is_injective(tau):
        raise ParseError(f"tau {tau} is not injective", line)
    w_toks = parts[2][8:].split()
    if len(w_toks) != N_VARS:
        raise ParseError(f"witness needs {N_VARS} fields, got {len(w_toks)}", line)
    witness = tuple(parse_rational(t, line) for t in w_toks)
    if M is not None:
        k = _starting_index(box, M)
        if k is None or not index_in_grid(k, M):
            raise ParseError(f"box is not a dyadic descendant of a grid box for M={M}", line)
    return CertificateEntry(box, tau, witness)


def serialize(cf: CertificateFile) -> str:
    lines = [
        f"{MAGIC} {cf.version}",
        f"M {cf.M}",
        f"region {'custom' if cf.region is None else cf.region}",
        f"shard {cf.shard[0]} {cf.shard[1]}",
    ]
    lines += [format_entry(e) for e in cf.entries]
    lines.append(f"count {len(cf.entries)}")
    return "\n".join(lines) + "\n"


def parse(text: str) -> CertificateFile:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) < 5:
        raise ParseError("truncated certificate file")
    head = lines[0].split()
    if len(head) != 2 or head[0] != MAGIC or not head[1].isdigit():
        raise ParseError("missing certificate header", 1)
    if int(head[1]) != FORMAT_VERSION:
        raise VersionMismatch(f"format version {head[1]}, expected {FORMAT_VERSION}", 1)

    def field_of(i, name):
        toks = lines[i].split()
        if not toks or toks[0] != name:
            raise ParseError(f"expected {name!r}", i + 1)
        return toks[1:]

    m = field_of(1, "M")
    if len(m) != 1 or not m[0].isdigit() or int(m[0]) < 1:
        raise ParseError("bad M", 2)
    M = int(m[0])
    r = field_of(2, "region")
    if len(r) != 1:
        raise ParseError("bad region", 3)
    if r[0] == "custom":
        region = None
    elif r[0].isdigit() and int(r[0]) < 512:
        region = int(r[0])
    else:
        raise ParseError("bad region", 3)
    s = field_of(3, "shard")
    if len(s) != 2 or not all(t.isdigit() for t in s) or int(s[0]) >= int(s[1]):
        raise ParseError("bad shard", 4)
    shard = (int(s[0]), int(s[1]))
    c = field_of(len(lines) - 1, "count")
    if len(c) != 1 or not c[0].isdigit():
        raise ParseError("bad count trailer", len(lines))
    body = lines[4:-1]
    if int(c[0]) != len(body):
        raise ParseError(f"count trailer says {c[0]} but file has {len(body)} entries", len(lines))
    grid_M = M if region is not None else None
    entries = [parse_entry(t, grid_M, i + 5) for i, t in enumerate(body)]
    return CertificateFile(M, region, shard, entries)


def write_certificates(cf: CertificateFile, path) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(serialize(cf), encoding="ascii")
    tmp.replace(path)


def read_certificates(path) -> CertificateFile:
    try:
        text = Path(path).read_text(encoding="ascii")
    except UnicodeDecodeError as exc:
        raise ParseError(f"non-ASCII content: {exc}") from exc
    return parse(text)


# --------------------------------------------------------------------------
# checking


def q_is_inside_corners(box: Box6, Q) -> bool:
    """Every vertex of ``Q`` lies in every corner polytope of ``box``."""
    V = vertices(Q).vertices
    return all(all(contains(o_polytope(c), v) for v in V) for c in box.corners())


def check_entry(e: CertificateEntry) -> bool:
    try:
        Q = q_polytope(e.box)
    except GeometryError as exc:
        raise BoxGeometryError(str(exc)) from exc
    if not q_is_inside_corners(e.box, Q):
        return False
    S = build_lp(e.box, e.tau, Q)
    try:
        ok = lp.check_witness(S, lp.Witness(e.witness))
    except lp.DimensionMismatch:
        return False
    return ok and witness_covers(e.box, e.tau, Q, e.witness)


@dataclass
class TilingReport:
    ok: bool
    problem: str = ""
    start_boxes: int = 0

    def __bool__(self):
        return self.ok


def _tile(box: Box6, leaves: list[Box6]) -> str:
    """Empty string iff ``leaves`` are the leaves of a bisection tree rooted at ``box``."""
    stack = [(box, leaves)]
    while stack:
        b, ls = stack.pop()
        if not ls:
            return f"gap: no leaf covers {format_box(b)}"
        if len(ls) == 1 and ls[0].key() == b.key():
            continue
        if any(l.key() == b.key() for l in ls):
            return f"overlap: {format_box(b)} is a leaf and also subdivided"
        for i in range(6):
            mid = (b.lo[i] + b.hi[i]) / 2
            lower = [l for l in ls if l.hi[i] <= mid]
            upper = [l for l in ls if l.lo[i] >= mid]
            if len(lower) + len(upper) == len(ls):
                blo = Box6(b.lo, b.hi[:i] + (mid,) + b.hi[i + 1:])
                bhi = Box6(b.lo[:i] + (mid,) + b.lo[i + 1:], b.hi)
                stack.append((bhi, upper))
                stack.append((blo, lower))
                break
        else:
            return f"overlap or non-dyadic leaves inside {format_box(b)}"
    return ""


def check_tiling(entries: Iterable[CertificateEntry], M: int,
                 starts: Optional[Iterable[tuple[int, ...]]] = None) -> TilingReport:
    """Exact audit that the entry boxes tile the starting boxes.

    ``starts`` defaults to the whole grid for ``M``.
    """
    groups: dict[tuple[int, ...], list[Box6]] = defaultdict(list)
    for e in entries:
        k = _starting_index(e.box, M)
        if k is None or not index_in_grid(k, M):
            return TilingReport(False, f"foreign or non-dyadic box {format_box(e.box)}")
        groups[k].append(e.box.without_region())
    expected = set(box_indices(M)) if starts is None else set(starts)
    for k in sorted(groups):
        if k not in expected:
            return TilingReport(False, f"foreign starting box {k}")
    for k in sorted(expected):
        if k not in groups:
            return TilingReport(False, f"missing starting box {k}")
        root = box_from_indices(k, M)
        vol = sum((b.volume for b in groups[k]), Fraction(0))
        if vol != root.volume:
            kind = "deficit" if vol < root.volume else "excess"
            return TilingReport(False, f"volume {kind} in starting box {k}: {vol} vs {root.volume}")
        problem = _tile(root, groups[k])
        if problem:
            return TilingReport(False, f"starting box {k}: {problem}")
    return TilingReport(True, "", len(expected))


def shard_assignments(M: int, n: int) -> Iterator[tuple[tuple[int, ...], int, int]]:
    """``(k, region, shard index)`` for every starting box: round-robin within each region."""
    pos: Counter = Counter()
    for k in box_indices(M):
        r = region_of_indices(k, M)
        yield k, r, pos[r] % n
        pos[r] += 1


def shard_starts(M: int, region: Optional[int], shard: tuple[int, int]) -> list[tuple[int, ...]]:
    """Starting-box indices handled by one (region, shard) run, in processing order.

    With ``region=None`` the whole grid is dealt round-robin instead.
    """
    i, n = shard
    if region is None:
        return [k for pos, k in enumerate(box_indices(M)) if pos % n == i]
    return [k for k, r, s in shard_assignments(M, n) if r == region and s == i]


def shard_plan(M: int, n: int) -> Counter:
    """Starting-box count of every ``(region, shard)`` run for ``n`` shards per region."""
    return Counter((r, s) for _, r, s in shard_assignments(M, n))


# --------------------------------------------------------------------------
# summaries


def entry_depth(box: Box6, M: int) -> int:
    ratio = Fraction(1, (2 * M) ** 6) / box.volume
    return ratio.numerator.bit_length() - 1


def stats(entries: Sequence[CertificateEntry], M: Optional[int] = None, box_stats: Sequence[dict] = ()) -> dict:
    """Counts per region, depth and tau histograms, timing aggregates."""
    per_region: Counter = Counter()
    depth: Counter = Counter()
    taus: Counter = Counter()
    starts = set()
    for e in entries:
        taus[e.tau] += 1
        if M is not None:
            k = _starting_index(e.box, M)
            if k is not None:
                starts.add(k)
                per_region[region_of_indices(k, M)] += 1
            depth[entry_depth(e.box, M)] += 1
    times = [float(b.get("seconds", 0.0)) for b in box_stats]
    return {
        "entries": len(entries),
        "start_boxes": len(starts),
        "max_depth": max(depth) if depth else 0,
        "depth_histogram": dict(sorted(depth.items())),
        "tau_histogram": dict(taus.most_common()),
        "per_region": dict(sorted(per_region.items())),
        "seconds_total": sum(times),
        "seconds_max": max(times) if times else 0.0,
        "seconds_mean": sum(times) / len(times) if times else 0.0,
    }
