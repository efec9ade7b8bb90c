"""Corpus-level evaluation reports: aggregation, CSV, and figures.

The eval pipeline produces one row per (page, attack); this module
folds them into per-attack means, writes the delimited table, and
renders the accuracy curves to PNG files next to it.
"""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

__all__ = ["aggregate", "write_report", "render_figures"]


def aggregate(page_rows: list) -> list:
    """Fold per-(page, attack) rows into per-attack means keyed by
    (kind, param, seed)."""
    groups = {}
    for row in page_rows:
        key = (row["attack"], row["param"], row["seed"])
        groups.setdefault(key, []).append(row)
    out = []
    for (kind, param, seed), rows in groups.items():
        accs = [r["acc"] for r in rows if r["acc"] is not None]
        errors = [r["error"] for r in rows if r["error"]]
        out.append(
            {
                "attack": kind,
                "param": param,
                "seed": seed,
                "pages": len(rows),
                "mean_acc": sum(accs) / len(accs) if accs else None,
                "failed_pages": len(errors),
                "runtime_ms": sum(r["runtime_ms"] for r in rows),
            }
        )
    out.sort(key=lambda r: (r["attack"], r["param"], r["seed"]))
    return out


def write_report(report: dict, out_dir) -> dict:
    """Write report.json and report.csv; returns file paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    json_path = out / "report.json"
    csv_path = out / "report.csv"
    json_path.write_text(json.dumps(report, indent=2))
    lines = ["attack,param,seed,pages,mean_acc,failed_pages,runtime_ms"]
    for r in report["attacks"]:
        acc = "" if r["mean_acc"] is None else f"{r['mean_acc']:.4f}"
        lines.append(
            f"{r['attack']},{r['param']},{r['seed']},{r['pages']},{acc},"
            f"{r['failed_pages']},{r['runtime_ms']:.1f}"
        )
    csv_path.write_text("\n".join(lines) + "\n")
    return {"json": str(json_path), "csv": str(csv_path)}


def _curve(ax, rows, kind, xlabel):
    pts = sorted(
        (r["param"], r["mean_acc"]) for r in rows
        if r["attack"] == kind and r["mean_acc"] is not None
    )
    if not pts:
        return False
    xs, ys = zip(*pts)
    ax.plot(xs, ys, marker="o")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("extraction accuracy (%)")
    ax.set_ylim(0, 105)
    ax.grid(True, alpha=0.3)
    return True


def render_figures(report: dict, out_dir) -> list:
    """Accuracy curves and the per-attack summary bars, as PNG files."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = report["attacks"]
    written = []

    for kind, xlabel, fname in [
        ("jpeg", "JPEG quality", "acc_vs_jpeg_quality.png"),
        ("scale", "scaling factor", "acc_vs_scale_factor.png"),
        ("gaussian_noise", "noise sigma", "acc_vs_noise_sigma.png"),
    ]:
        fig, ax = plt.subplots(figsize=(5, 3.5))
        if _curve(ax, rows, kind, xlabel):
            ax.set_title(f"robustness to {kind}")
            fig.tight_layout()
            path = out / fname
            fig.savefig(path, dpi=120)
            written.append(str(path))
        plt.close(fig)

    by_kind = {}
    for r in rows:
        if r["mean_acc"] is not None:
            by_kind.setdefault(r["attack"], []).append(r["mean_acc"])
    if by_kind:
        fig, ax = plt.subplots(figsize=(6, 3.5))
        kinds = sorted(by_kind)
        means = [sum(v) / len(v) for v in (by_kind[k] for k in kinds)]
        ax.bar(kinds, means)
        ax.set_ylabel("mean accuracy (%)")
        ax.set_ylim(0, 105)
        ax.tick_params(axis="x", rotation=20)
        fig.tight_layout()
        path = out / "acc_by_attack.png"
        fig.savefig(path, dpi=120)
        written.append(str(path))
        plt.close(fig)
    return written
