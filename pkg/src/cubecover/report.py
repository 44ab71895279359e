"""CSV tables and matplotlib figures for certificate summaries."""
from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _write_csv(path: Path, header: Sequence[str], rows) -> Path:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return path


def write_tables(summary: dict, out_dir, box_stats: Sequence[dict] = ()) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = [
        _write_csv(out / "summary.csv", ("key", "value"),
                   [(k, v) for k, v in summary.items() if not isinstance(v, dict)]),
        _write_csv(out / "depth.csv", ("depth", "entries"), summary["depth_histogram"].items()),
        _write_csv(out / "tau.csv", ("tau", "entries"),
                   ((" ".join(map(str, t)), n) for t, n in summary["tau_histogram"].items())),
        _write_csv(out / "regions.csv", ("region", "entries"), summary["per_region"].items()),
    ]
    if box_stats:
        keys = ("box", "leaves", "max_depth", "taus_tried", "pivots", "unresolved", "seconds")
        files.append(_write_csv(out / "boxes.csv", keys, ([b.get(k, "") for k in keys] for b in box_stats)))
    return files


def _bar(path: Path, xs, ys, xlabel: str, ylabel: str, title: str) -> Path:
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.bar([str(x) for x in xs], ys, color="#4C72B0")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    if len(xs) > 20:
        ax.set_xticks([])
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def write_figures(summary: dict, out_dir, box_stats: Sequence[dict] = (), top_taus: int = 20) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = []
    d = summary["depth_histogram"]
    files.append(_bar(out / "depth_histogram.png", list(d), list(d.values()),
                      "subdivision depth", "entries", "Leaf boxes by depth"))
    t = list(summary["tau_histogram"].items())[:top_taus]
    files.append(_bar(out / "tau_usage.png", [i for i in range(len(t))], [n for _, n in t],
                      "map rank", "entries", f"Most used maps (top {len(t)})"))
    r = summary["per_region"]
    files.append(_bar(out / "region_counts.png", list(r), list(r.values()),
                      "region", "entries", "Entries per region"))
    secs = [float(b.get("seconds", 0.0)) for b in box_stats]
    if secs:
        fig, ax = plt.subplots(figsize=(7, 4))
        ax.hist(secs, bins=min(30, max(1, len(secs))), color="#55A868")
        ax.set_xlabel("seconds per starting box")
        ax.set_ylabel("starting boxes")
        ax.set_title("Search time per starting box")
        fig.tight_layout()
        fig.savefig(out / "box_seconds.png", dpi=120)
        plt.close(fig)
        files.append(out / "box_seconds.png")
    return files
