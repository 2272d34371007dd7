"""File reports for fuzz runs: delimited trial data plus figures.

Writes, into a chosen directory:

* ``trials.csv``          one row per trial
* ``disagreements.jsonl`` one JSON record per disagreement (empty file
                          when the run is clean)
* ``verdicts.png``        verdict/oracle outcome counts
* ``model_sizes.png``     extracted model sizes against the cubic bound
"""
from __future__ import annotations

import csv
import json
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .oracle import FuzzReport  # noqa: E402


def write_report(report: FuzzReport, outdir: str) -> dict[str, str]:
    """Write all report artifacts; returns {artifact: path}."""
    os.makedirs(outdir, exist_ok=True)
    paths = {
        "trials": os.path.join(outdir, "trials.csv"),
        "disagreements": os.path.join(outdir, "disagreements.jsonl"),
        "verdicts": os.path.join(outdir, "verdicts.png"),
        "model_sizes": os.path.join(outdir, "model_sizes.png"),
    }

    rows = [r.to_row() for r in report.records]
    fieldnames = ["trial", "formula", "solver", "oracle_found",
                  "model_states", "state_bound", "disagreement", "reason"]
    with open(paths["trials"], "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)

    with open(paths["disagreements"], "w") as fh:
        for rec in report.disagreements:
            fh.write(json.dumps({"seed": report.seed, **rec.to_row()},
                                sort_keys=True) + "\n")

    _verdict_figure(report, paths["verdicts"])
    _sizes_figure(report, paths["model_sizes"])
    return paths


def _verdict_figure(report: FuzzReport, path: str) -> None:
    labels = ["solver SAT", "solver UNSAT", "oracle hit", "oracle none",
              "disagree"]
    sat = sum(1 for r in report.records if r.solver_verdict == "SAT")
    unsat = sum(1 for r in report.records if r.solver_verdict == "UNSAT")
    hit = sum(1 for r in report.records if r.oracle_found)
    counts = [sat, unsat, hit, len(report.records) - hit,
              len(report.disagreements)]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.bar(labels, counts, color=["#4c72b0", "#55a868", "#c44e52",
                                  "#8172b2", "#937860"])
    ax.set_ylabel("trials")
    ax.set_title(f"fuzz outcomes (seed {report.seed}, shape {report.shape})")
    for i, c in enumerate(counts):
        ax.text(i, c, str(c), ha="center", va="bottom", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _sizes_figure(report: FuzzReport, path: str) -> None:
    pts = [(r.state_bound, r.model_states) for r in report.records
           if r.model_states is not None]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    if pts:
        bounds, sizes = zip(*pts)
        ax.scatter(bounds, sizes, s=14, alpha=0.6, label="extracted model")
        lim = max(bounds)
        ax.plot([0, lim], [0, lim], "k--", linewidth=1, label="cubic bound")
        ax.legend(fontsize=8)
    ax.set_xlabel("state bound 3·|f|³ + 1")
    ax.set_ylabel("extracted states")
    ax.set_title("certificate sizes stay under the bound")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
