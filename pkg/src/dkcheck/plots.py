"""Figures and delimited tables for differential reports."""
from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def agreement_fractions(report) -> np.ndarray:
    counts = np.asarray(report.agreement, dtype=float)
    return counts / max(report.point_count, 1)


def write_agreement_csv(report, path) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["variant", *report.variants, "true_count", "oracle_agreement"])
        for i, name in enumerate(report.variants):
            w.writerow([name, *report.agreement[i], report.true_counts[i], report.oracle_agreement[i]])
    return path


def plot_agreement(report, path) -> Path:
    frac = agreement_fractions(report)
    labels = report.variants
    fig, ax = plt.subplots(figsize=(8, 7))
    im = ax.imshow(frac, vmin=min(0.9, frac.min()), vmax=1.0, cmap="viridis")
    ax.set_xticks(range(len(labels)))
    ax.set_yticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=60, ha="right", fontsize=7)
    ax.set_yticklabels(labels, fontsize=7)
    for i in range(len(labels)):
        for j in range(len(labels)):
            if frac[i, j] < 1:
                ax.text(j, i, f"{frac[i, j]:.3f}", ha="center", va="center", fontsize=5, color="w")
    fig.colorbar(im, ax=ax, fraction=0.046, pad=0.04, label="fraction of points in agreement")
    ax.set_title(f"Pairwise agreement over {report.point_count} points")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def plot_verdicts(report, path) -> Path:
    labels = report.variants
    n = max(report.point_count, 1)
    true_frac = np.asarray(report.true_counts) / n
    fig, ax = plt.subplots(figsize=(8, 3.5))
    colors = ["tab:orange" if v.startswith("(cap") else "tab:blue" for v in labels]
    ax.bar(range(len(labels)), true_frac, color=colors)
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=60, ha="right", fontsize=7)
    ax.set_ylabel("fraction true")
    ax.set_ylim(0, 1)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def render_report(report, outdir) -> list:
    """Write agreement.png, verdicts.png and agreement.csv into ``outdir``."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    return [
        plot_agreement(report, outdir / "agreement.png"),
        plot_verdicts(report, outdir / "verdicts.png"),
        write_agreement_csv(report, outdir / "agreement.csv"),
    ]
