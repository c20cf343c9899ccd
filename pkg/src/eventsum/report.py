"""Report rendering: CSV tables plus matplotlib figures written to files.

Used by the CLI's --report option on `evaluate`, `tune`, and `summarize`.
Figures are rendered with the Agg backend so reports work headless.
"""

from __future__ import annotations

import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

_FIG_PARAMS = {
    "figure.figsize": (7.0, 4.2),
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.grid": True,
    "grid.alpha": 0.3,
}


def _newfig():
    plt.rcParams.update(_FIG_PARAMS)
    return plt.subplots()


def _write_csv(path, fieldnames, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)


def save_rouge_report(rows: list[dict], outdir: str | os.PathLike) -> list[str]:
    """Per-cluster ROUGE bars + scores.csv; returns the written paths."""
    os.makedirs(outdir, exist_ok=True)
    flat = [
        {
            "id": row["id"],
            "rouge1_f": row["rouge1"]["f"],
            "rouge2_f": row["rouge2"]["f"],
            "rougeL_f": row["rougeL"]["f"],
        }
        for row in rows
    ]
    csv_path = os.path.join(outdir, "scores.csv")
    _write_csv(csv_path, ["id", "rouge1_f", "rouge2_f", "rougeL_f"], flat)

    fig, ax = _newfig()
    ids = [r["id"] for r in flat]
    x = range(len(ids))
    width = 0.27
    for offset, (key, label) in enumerate(
        [("rouge1_f", "ROUGE-1"), ("rouge2_f", "ROUGE-2"), ("rougeL_f", "ROUGE-L")]
    ):
        ax.bar([i + (offset - 1) * width for i in x], [r[key] for r in flat], width, label=label)
    ax.set_xticks(list(x))
    ax.set_xticklabels(ids, rotation=30, ha="right")
    ax.set_ylabel("F-measure")
    ax.set_ylim(0, 1.05)
    ax.legend()
    fig.tight_layout()
    fig_path = os.path.join(outdir, "rouge_scores.png")
    fig.savefig(fig_path, dpi=150)
    plt.close(fig)
    return [csv_path, fig_path]


def save_tuning_report(table: list[dict], outdir: str | os.PathLike) -> list[str]:
    """Grid-point score curve + grid_scores.csv; returns the written paths."""
    os.makedirs(outdir, exist_ok=True)
    fieldnames = ["alpha", "lambda1", "lambda2", "k", "c", "rouge2_f", "rougeL_f", "score"]
    csv_path = os.path.join(outdir, "grid_scores.csv")
    _write_csv(csv_path, fieldnames, table)

    fig, ax = _newfig()
    scores = [row["score"] for row in table]
    ax.plot(range(len(scores)), scores, marker="o", lw=1)
    best = max(range(len(scores)), key=lambda i: scores[i]) if scores else 0
    if scores:
        ax.scatter([best], [scores[best]], color="crimson", zorder=3, label="best")
        ax.legend()
    ax.set_xlabel("grid point (row-major order)")
    ax.set_ylabel("ROUGE-2 F + ROUGE-L F")
    fig.tight_layout()
    fig_path = os.path.join(outdir, "grid_scores.png")
    fig.savefig(fig_path, dpi=150)
    plt.close(fig)
    return [csv_path, fig_path]


def save_extraction_report(output: dict, outdir: str | os.PathLike) -> list[str]:
    """Marginal-gain curve and objective breakdown for one summarize run."""
    os.makedirs(outdir, exist_ok=True)
    gains = output["gains"]
    rows = [{"step": i + 1, "gain": g} for i, g in enumerate(gains)]
    csv_path = os.path.join(outdir, "gains.csv")
    _write_csv(csv_path, ["step", "gain"], rows)

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.5, 3.8))
    plt.rcParams.update(_FIG_PARAMS)
    ax1.plot(range(1, len(gains) + 1), gains, marker="o", lw=1)
    ax1.set_xlabel("greedy step")
    ax1.set_ylabel("marginal gain")
    scores = output["scores"]
    parts = ["coverage", "diversity", "bias"]
    ax2.bar(parts, [scores[p] for p in parts])
    ax2.set_ylabel("objective component")
    fig.tight_layout()
    fig_path = os.path.join(outdir, "extraction.png")
    fig.savefig(fig_path, dpi=150)
    plt.close(fig)
    return [csv_path, fig_path]
