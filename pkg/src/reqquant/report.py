"""Report rendering: delimited metric tables plus figures on disk.

Used by the CLI's evaluate and sweep paths; everything here is presentation
only.  Figures are rendered headlessly through the Agg backend.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .curves import Quantification

METRIC_KEYS = ("p2p", "chebyshev", "rmse", "iad")
METRIC_LABELS = {"p2p": "P2P", "chebyshev": "Chebyshev", "rmse": "RMSE", "iad": "IAD"}


def _plot_curve(ax, q: Quantification, label: str, style: str) -> None:
    xs = [p.x for p in q.points]
    ys = [p.y for p in q.points]
    ax.plot(xs, ys, style, marker="o", label=label)


def write_evaluate_report(out_dir: str | Path,
                          rows: Sequence[Mapping],
                          aggregates: Mapping[str, Mapping[str, float]],
                          curves: Mapping[str, tuple[Quantification, Quantification]]) -> list[Path]:
    """Write metrics.csv, aggregates.csv, one overlay figure per record, and
    a summary figure; returns the paths written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    table = out / "metrics.csv"
    with table.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", *METRIC_KEYS])
        for row in rows:
            writer.writerow([row["id"], *(f"{row[k]:.6f}" for k in METRIC_KEYS)])
    written.append(table)

    agg = out / "aggregates.csv"
    with agg.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "mean", "deviation"])
        for key in METRIC_KEYS:
            writer.writerow([key, f"{aggregates[key]['mean']:.6f}",
                             f"{aggregates[key]['deviation']:.6f}"])
    written.append(agg)

    for record_id, (produced, truth) in curves.items():
        fig, ax = plt.subplots(figsize=(5, 3.2))
        _plot_curve(ax, truth, "ground truth", "-")
        _plot_curve(ax, produced, "produced", "--")
        ax.set_xlabel("metric value")
        ax.set_ylabel("satisfaction")
        ax.set_ylim(-0.05, 1.05)
        ax.legend(loc="best", fontsize=8)
        ax.set_title(str(record_id), fontsize=9)
        fig.tight_layout()
        path = out / f"curve_{_safe(record_id)}.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)

    fig, ax = plt.subplots(figsize=(5, 3.2))
    means = [aggregates[k]["mean"] for k in METRIC_KEYS]
    errs = [aggregates[k]["deviation"] for k in METRIC_KEYS]
    ax.bar([METRIC_LABELS[k] for k in METRIC_KEYS], means, yerr=errs,
           capsize=4, color="#2a9d8f")
    ax.set_ylabel("mean distance")
    fig.tight_layout()
    path = out / "summary.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)
    return written


def write_sweep_report(out_dir: str | Path, param: str,
                       rows: Sequence[Mapping]) -> list[Path]:
    """Write sweep.csv plus one figure with a panel per metric; ``rows`` are
    {"value": v, "<metric>_mean": m, "<metric>_deviation": d, ...}."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    table = out / "sweep.csv"
    with table.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        header = ["value"]
        for key in METRIC_KEYS:
            header += [f"{key}_mean", f"{key}_deviation"]
        writer.writerow(header)
        for row in rows:
            line = [row["value"]]
            for key in METRIC_KEYS:
                line += [f"{row[f'{key}_mean']:.6f}", f"{row[f'{key}_deviation']:.6f}"]
            writer.writerow(line)
    written.append(table)

    fig, axes = plt.subplots(1, 4, figsize=(12, 2.8))
    values = [row["value"] for row in rows]
    for ax, key in zip(axes, METRIC_KEYS):
        ax.plot(values, [row[f"{key}_mean"] for row in rows], marker="o")
        ax.set_title(METRIC_LABELS[key], fontsize=9)
        ax.set_xlabel(param)
    axes[0].set_ylabel("mean distance")
    fig.tight_layout()
    path = out / "sweep.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)
    return written


def _safe(name: str) -> str:
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in str(name))
