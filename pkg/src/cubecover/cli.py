"""Command line entry point: ``cubecover <subcommand> ...``.

Exit codes: 0 when every requested check passed, 1 when something failed or
stayed unresolved, 2 for usage, I/O and parse errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from . import certify, search
from .config import Box6, box_indices, count_boxes, region_of_indices
from .cover import enumerate_taus, is_injective, verify_box

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _shard(text: str) -> tuple[int, int]:
    try:
        i, n = (int(t) for t in text.split("/"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"shard must look like i/n, got {text!r}")
    if not 0 <= i < n:
        raise argparse.ArgumentTypeError(f"shard index {i} not below total {n}")
    return i, n


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _box(values: Sequence[str]) -> Box6:
    try:
        nums = [Fraction(v) for v in values]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad box value: {exc}")
    lo, hi = nums[:6], nums[6:]
    if any(not (0 <= a < b <= 1) for a, b in zip(lo, hi)):
        raise UsageError("box needs 0 <= lo < hi <= 1 in every coordinate")
    return Box6.make(lo, hi)


def _tau(values: Sequence[int]) -> tuple[int, ...]:
    if any(not 0 <= k <= 11 for k in values) or not is_injective(values):
        raise UsageError(f"tau {tuple(values)} must be 6 distinct edge indices in 0..11")
    return tuple(values)


def _regions(text: Optional[str]) -> Optional[list[int]]:
    if text is None:
        return None
    if text == "all":
        return list(range(512))
    out = []
    for part in text.split(","):
        a, _, b = part.partition("-")
        out += range(int(a), int(b or a) + 1)
    if any(not 0 <= r < 512 for r in out):
        raise UsageError("region ids lie in 0..511")
    return out


# --------------------------------------------------------------------------
# subcommands


def cmd_enumerate(args) -> int:
    regions = _regions(args.region)
    if regions is None and args.count_only:
        print(count_boxes(args.M))
        return EXIT_OK
    wanted = None if regions is None else set(regions)
    n = 0
    for k in box_indices(args.M):
        if wanted is not None and region_of_indices(k, args.M) not in wanted:
            continue
        n += 1
        if not args.count_only:
            print(" ".join(map(str, k)))
    if args.count_only:
        print(n)
    return EXIT_OK


def _search_cfg(args) -> search.SearchConfig:
    return search.SearchConfig(M=args.M, max_depth=args.max_depth, prescreen=not args.no_prescreen,
                               seed=args.seed, shard=args.shard)


def cmd_search(args) -> int:
    cfg = _search_cfg(args)
    short = search.load_shortlist(args.shortlist)
    out = Path(args.out)
    if args.box is not None:
        P = _box(args.box)
        r = search.search_box(P, short, search.LongList(), cfg)
        out.mkdir(parents=True, exist_ok=True)
        entries = sorted(r.entries, key=lambda e: e.box.key())
        path = out / f"{search.run_name(None, cfg.shard)}.cert"
        certify.write_certificates(certify.CertificateFile(cfg.M, None, cfg.shard, entries), path)
        print(f"{path}: {len(entries)} entries, {len(r.unresolved)} unresolved")
        for u in r.unresolved:
            print(f"UNRESOLVED depth {u.depth}: {certify.format_box(u.box)} ({u.reason})")
        return EXIT_FAIL if r.unresolved else EXIT_OK
    regions = _regions(args.region)
    if not regions:
        raise UsageError("search needs --region or --box")
    workers = args.workers or search.default_workers()
    results = search.run_regions(regions, cfg, short, out, args.resume, workers, args.limit)
    bad = 0
    for region, n_entries, n_unresolved in results:
        print(f"region {region:3d}: {n_entries} entries, {n_unresolved} unresolved")
        bad += n_unresolved
    return EXIT_FAIL if bad else EXIT_OK


def cmd_verify(args) -> int:
    P = _box(args.box)
    tau = _tau(args.tau)
    v = verify_box(P, tau, not args.no_prescreen)
    print(f"{v.status.upper()} q={v.q} pivots={v.pivots} ({v.detail})")
    if v.feasible and args.witness:
        print("witness: " + " ".join(certify.fmt_rational(x) for x in v.witness.values))
    return EXIT_OK if v.feasible else EXIT_FAIL


def _check_one(e: certify.CertificateEntry) -> str:
    try:
        return "" if certify.check_entry(e) else "witness rejected"
    except certify.BoxGeometryError as exc:
        return f"box geometry error: {exc}"


def _map(fn, items, workers: int):
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def cmd_check(args) -> int:
    workers = args.workers or search.default_workers()
    failed = False
    by_grid: dict[int, tuple[list, set]] = {}
    for path in args.paths:
        cf = certify.read_certificates(path)
        problems = _map(_check_one, cf.entries, workers)
        n_bad = 0
        for i, msg in enumerate(problems):
            if msg:
                n_bad += 1
                print(f"FAIL {path}:{i + 5}: {msg}")
        print(f"{'PASS' if not n_bad else 'FAIL'} {path}: {len(cf.entries) - n_bad}/{len(cf.entries)} entries verified")
        failed |= bool(n_bad)
        if args.tiling:
            if cf.region is None:
                print(f"SKIP tiling for {path}: custom box run")
                continue
            entries, starts = by_grid.setdefault(cf.M, ([], set()))
            entries += cf.entries
            starts.update(certify.shard_starts(cf.M, cf.region, cf.shard))
    for M, (entries, starts) in sorted(by_grid.items()):
        rep = certify.check_tiling(entries, M, starts)
        if rep:
            print(f"PASS tiling M={M}: {rep.start_boxes} starting boxes tiled exactly")
        else:
            print(f"FAIL tiling M={M}: {rep.problem}")
            failed = True
    return EXIT_FAIL if failed else EXIT_OK


def cmd_props(args) -> int:
    from .properties import SUITES, run_suites

    names = args.suite or list(SUITES)
    for n in names:
        if n not in SUITES:
            raise UsageError(f"unknown suite {n!r}; choose from {', '.join(SUITES)}")
    reports = run_suites(names, args.seed, args.trials)
    for rep in reports:
        print(rep.line())
        if args.verbose:
            for note in rep.notes:
                print(f"  {note}")
        for f in rep.failures[:10]:
            print(f"  failure: {f}")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_stats(args) -> int:
    from .report import write_figures, write_tables

    entries, box_stats, M = [], [], None
    for path in args.paths:
        cf = certify.read_certificates(path)
        if M is not None and cf.M != M:
            raise UsageError("all certificate files must share the same M")
        M = cf.M
        entries += cf.entries
        side = Path(path).with_name(Path(path).name.removesuffix(".cert") + ".stats.json")
        if side.exists():
            box_stats += json.loads(side.read_text())["box_stats"]
    summary = certify.stats(entries, M, box_stats)
    for key, value in summary.items():
        if not isinstance(value, dict):
            print(f"{key}: {value}")
    print(f"depth_histogram: {summary['depth_histogram']}")
    if args.out:
        files = write_tables(summary, args.out, box_stats) + write_figures(summary, args.out, box_stats)
        for f in files:
            print(f"wrote {f}")
    return EXIT_OK


def cmd_import(args) -> int:
    from .released import ImportOptions, import_paths

    edge_map = [int(t) for t in args.edge_map.split(",")] if args.edge_map else None
    if edge_map is not None and sorted(edge_map) != list(range(12)):
        raise UsageError("--edge-map must be a permutation of 0..11")
    opts = ImportOptions(args.layout, args.scale, args.tau_base, edge_map, not args.no_prescreen)
    rep = import_paths(args.paths, opts, args.limit)
    region = None if args.region is None else int(args.region)
    cf = certify.CertificateFile(args.M, region, (0, 1), sorted(rep.entries, key=lambda e: e.box.key()))
    certify.write_certificates(cf, args.out)
    print(f"imported {len(rep.entries)} entries, {len(rep.infeasible)} not feasible, "
          f"{len(rep.skipped)} unreadable lines -> {args.out}")
    for n, msg in (rep.skipped + rep.infeasible)[:10]:
        print(f"  line {n}: {msg}")
    return EXIT_OK if rep.entries and not rep.infeasible else EXIT_FAIL


def cmd_taus(args) -> int:
    taus = enumerate_taus(not args.unrestricted)
    if args.count_only:
        print(len(taus))
    else:
        for t in taus:
            print(" ".join(map(str, t)))
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cubecover", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="progress logging and suite notes")
    sub = p.add_subparsers(dest="command", required=True)
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[common], **kw)

    sub.add_parser = add_parser  # type: ignore[method-assign]

    def grid(sp):
        sp.add_argument("--M", type=_positive, default=10, help="grid parameter; boxes have side 1/(2M)")

    sp = sub.add_parser("enumerate", help="list or count the starting boxes")
    grid(sp)
    sp.add_argument("--region", help="region id, list (3,7), range (0-15) or 'all'")
    sp.add_argument("--count-only", action="store_true")
    sp.set_defaults(fn=cmd_enumerate)

    sp = sub.add_parser("taus", help="list or count the maps tau")
    sp.add_argument("--unrestricted", action="store_true", help="all injective maps, not only face-incident")
    sp.add_argument("--count-only", action="store_true")
    sp.set_defaults(fn=cmd_taus)

    sp = sub.add_parser("search", help="run the subdivision search and write certificates")
    grid(sp)
    sp.add_argument("--region", help="region id, list, range or 'all'")
    sp.add_argument("--box", nargs=12, metavar="X", help="custom box: lo1..lo6 hi1..hi6")
    sp.add_argument("--shard", type=_shard, default=(0, 1), help="i/n: every n-th starting box from i")
    sp.add_argument("--workers", type=_positive, help="parallel regions (default: CUBECOVER_WORKERS or CPUs)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--no-prescreen", action="store_true")
    sp.add_argument("--max-depth", type=int, default=12)
    sp.add_argument("--out", default="certificates")
    sp.add_argument("--resume", action="store_true")
    sp.add_argument("--limit", type=int, help="only the first N starting boxes of each shard")
    sp.add_argument("--shortlist", help="short-list file (default: bundled list)")
    sp.set_defaults(fn=cmd_search)

    sp = sub.add_parser("verify", help="solve L(P, tau) for one box")
    sp.add_argument("--box", nargs=12, metavar="X", required=True, help="lo1..lo6 hi1..hi6")
    sp.add_argument("--tau", nargs=6, type=int, metavar="K", required=True)
    sp.add_argument("--no-prescreen", action="store_true")
    sp.add_argument("--witness", action="store_true", help="print the witness")
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("check", help="re-verify certificate files without an LP solver")
    sp.add_argument("paths", nargs="+")
    sp.add_argument("--tiling", action="store_true")
    sp.add_argument("--workers", type=_positive)
    sp.set_defaults(fn=cmd_check)

    sp = sub.add_parser("props", help="randomized property suites")
    sp.add_argument("--suite", action="append", help="suite name (repeatable; default all)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=_positive, help="override the per-suite trial count")
    sp.set_defaults(fn=cmd_props)

    sp = sub.add_parser("stats", help="summaries, CSV tables and figures for certificate files")
    sp.add_argument("paths", nargs="+")
    sp.add_argument("--out", help="directory for CSV tables and PNG figures")
    sp.set_defaults(fn=cmd_stats)

    sp = sub.add_parser("import-released", help="best-effort conversion of published (box, tau) lists")
    sp.add_argument("paths", nargs="+")
    grid(sp)
    sp.add_argument("--out", required=True)
    sp.add_argument("--region")
    sp.add_argument("--layout", choices=("lohi", "pairs"), default="lohi")
    sp.add_argument("--scale", type=_positive, default=1)
    sp.add_argument("--tau-base", type=int, choices=(0, 1), default=0)
    sp.add_argument("--edge-map", help="12 comma-separated edge indices")
    sp.add_argument("--limit", type=int)
    sp.add_argument("--no-prescreen", action="store_true")
    sp.set_defaults(fn=cmd_import)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.fn(args)
    except (UsageError, ValueError, OSError) as exc:  # ParseError is a ValueError
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
