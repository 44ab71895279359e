"""One-way, best-effort import of externally produced (box, tau) lists.

The published per-region lists store boxes and maps but no witnesses, and
their exact layout is not documented.  This converter extracts the numbers
from each line, reads the first twelve as a box and the last six as a map,
re-solves every pair exactly and keeps the pairs that come back Feasible.
Layout choices that cannot be inferred from the data are options.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .certify import CertificateEntry
from .config import Box6
from .cover import is_injective, verify_box

_NUM = re.compile(r"-?\d+(?:/\d+|\.\d+)?")


@dataclass
class ImportOptions:
    box_layout: str = "lohi"  # "lohi": lo1..lo6 hi1..hi6, "pairs": lo1 hi1 .. lo6 hi6
    scale: int = 1  # box numbers are multiples of 1/scale
    tau_base: int = 0  # 1 if the source numbers edges from one
    edge_map: Optional[Sequence[int]] = None  # source edge -> our edge index
    prescreen: bool = True


@dataclass
class ImportReport:
    entries: list[CertificateEntry] = field(default_factory=list)
    skipped: list[tuple[int, str]] = field(default_factory=list)
    infeasible: list[tuple[int, str]] = field(default_factory=list)


def parse_line(text: str, opts: ImportOptions) -> Optional[tuple[Box6, tuple[int, ...]]]:
    nums = _NUM.findall(text.split("#", 1)[0])
    if len(nums) < 18:
        return None
    box_vals = [Fraction(t) / opts.scale for t in nums[:12]]
    if opts.box_layout == "pairs":
        lo, hi = box_vals[0::2], box_vals[1::2]
    elif opts.box_layout == "lohi":
        lo, hi = box_vals[:6], box_vals[6:]
    else:
        raise ValueError(f"unknown box layout {opts.box_layout!r}")
    tau = []
    for t in nums[-6:]:
        k = int(t) - opts.tau_base
        if opts.edge_map is not None:
            k = opts.edge_map[k]
        tau.append(k)
    if any(not 0 <= k <= 11 for k in tau) or not is_injective(tau):
        raise ValueError(f"bad edge indices {tau}")
    return Box6.make(lo, hi), tuple(tau)


def import_lines(lines: Iterable[str], opts: ImportOptions, limit: Optional[int] = None) -> ImportReport:
    rep = ImportReport()
    for lineno, text in enumerate(lines, 1):
        if limit is not None and len(rep.entries) >= limit:
            break
        try:
            parsed = parse_line(text, opts)
        except (ValueError, ZeroDivisionError) as exc:
            rep.skipped.append((lineno, str(exc)))
            continue
        if parsed is None:
            continue
        box, tau = parsed
        v = verify_box(box, tau, opts.prescreen)
        if v.feasible:
            rep.entries.append(CertificateEntry(box, tau, v.witness.values))
        else:
            rep.infeasible.append((lineno, f"{v.status} ({v.detail})"))
    return rep


def import_paths(paths: Sequence, opts: ImportOptions, limit: Optional[int] = None) -> ImportReport:
    total = ImportReport()
    for p in paths:
        files = sorted(Path(p).rglob("*")) if Path(p).is_dir() else [Path(p)]
        for f in files:
            if not f.is_file():
                continue
            left = None if limit is None else limit - len(total.entries)
            if left is not None and left <= 0:
                return total
            r = import_lines(f.read_text(errors="replace").splitlines(), opts, left)
            total.entries += r.entries
            total.skipped += [(n, f"{f}: {m}") for n, m in r.skipped]
            total.infeasible += [(n, f"{f}: {m}") for n, m in r.infeasible]
    return total
