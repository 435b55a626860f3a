"""Matplotlib figures for the report objects (headless, PNG output).

Used by the CLI when --figures is passed: each report type maps to one or
more charts written next to the delimited output.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from docsimp.core import EditCategory, EditClass, class_of  # noqa: E402
from docsimp.metrics import (  # noqa: E402
    AgreementReport,
    CorpusStats,
    GenerationReport,
    IdentificationReport,
)

_CLASS_COLORS = {
    EditClass.LEXICAL: "#4c72b0",
    EditClass.SYNTACTIC: "#dd8452",
    EditClass.DISCOURSE: "#55a868",
    EditClass.SEMANTIC: "#c44e52",
    EditClass.NON_SIMPLIFICATION: "#8172b3",
}


def _category_colors(categories: list[EditCategory]) -> list[str]:
    return [_CLASS_COLORS[class_of(c)] for c in categories]


def _save(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_category_distribution(stats: CorpusStats, path: Path) -> Path:
    """Horizontal bars: group count per category, colored by class."""
    rows = [r for r in stats.rows if r.n_groups > 0] or list(stats.rows)
    cats = [r.category for r in rows]
    counts = [r.n_groups for r in rows]
    fig, ax = plt.subplots(figsize=(7, 0.35 * max(len(rows), 4) + 1))
    ypos = range(len(rows))
    ax.barh(list(ypos), counts, color=_category_colors(cats))
    ax.set_yticks(list(ypos))
    ax.set_yticklabels([c.value for c in cats])
    ax.invert_yaxis()
    ax.set_xlabel("edit groups")
    ax.set_title("Edit category distribution")
    return _save(fig, path)


def plot_groups_per_doc(stats: CorpusStats, path: Path) -> Path:
    counts = dict(stats.groups_per_doc)
    xs = sorted(counts)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.bar(xs, [counts[x] for x in xs], color="#4c72b0")
    ax.set_xlabel("edit groups in document")
    ax.set_ylabel("documents")
    ax.set_title(f"Groups per document (mean {stats.mean_groups_per_doc:.1f})")
    return _save(fig, path)


def plot_distinct_classes(stats: CorpusStats, path: Path) -> Path:
    counts = dict(stats.distinct_classes_per_doc)
    xs = sorted(counts)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.bar(xs, [counts[x] for x in xs], color="#55a868")
    ax.set_xlabel("distinct simplification classes in document")
    ax.set_ylabel("documents")
    ax.set_title("Class diversity per document")
    return _save(fig, path)


def plot_identification(report: IdentificationReport, path: Path) -> Path:
    """Per-category F1 bars with the weighted aggregate as a reference line."""
    rows = [r for r in report.rows if r.support > 0] or list(report.rows)
    cats = [r.category for r in rows]
    fig, ax = plt.subplots(figsize=(7, 0.35 * max(len(rows), 4) + 1))
    ypos = range(len(rows))
    ax.barh(list(ypos), [r.f1 for r in rows], color=_category_colors(cats))
    ax.set_yticks(list(ypos))
    ax.set_yticklabels([c.value for c in cats])
    ax.invert_yaxis()
    ax.axvline(report.category_f1, color="black", linestyle="--", linewidth=1)
    ax.set_xlim(0, 100)
    ax.set_xlabel("F1")
    ax.set_title(f"Identification F1 by category (weighted {report.category_f1:.1f})")
    return _save(fig, path)


def plot_agreement(report: AgreementReport, path: Path) -> Path:
    pairs = [(k.value, v) for k, v in report.fleiss_per_class.items() if v is not None]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    if pairs:
        labels, values = zip(*pairs)
        ax.bar(range(len(labels)), values, color="#dd8452")
        ax.set_xticks(range(len(labels)))
        ax.set_xticklabels(labels, rotation=20, ha="right")
    ax.set_ylim(-0.2, 1.0)
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_ylabel("Fleiss kappa")
    ax.set_title(f"Agreement by class ({report.unit} unit)")
    return _save(fig, path)


def plot_generation(report: GenerationReport, path: Path) -> Path:
    dist = [(k.value, v) for k, v in report.category_distribution.items() if v > 0]
    fig, ax = plt.subplots(figsize=(7, 3.5))
    if dist:
        labels, values = zip(*dist)
        cats = [EditCategory(lbl) for lbl in labels]
        ax.bar(range(len(labels)), values, color=_category_colors(cats))
        ax.set_xticks(range(len(labels)))
        ax.set_xticklabels(labels, rotation=45, ha="right")
        ax.set_ylabel("% of edit groups")
    else:
        ax.bar(["SARI", "compression×100"], [report.sari_mean, report.compression_mean * 100])
        ax.set_ylabel("score")
    ax.set_title("Generation profile")
    return _save(fig, path)


def render_figures(report: Any, out_dir: Path, stem: str = "report") -> list[Path]:
    """Write every figure that applies to `report`; returns written paths."""
    out_dir = Path(out_dir)
    written: list[Path] = []
    if isinstance(report, CorpusStats):
        written.append(plot_category_distribution(report, out_dir / f"{stem}_categories.png"))
        written.append(plot_groups_per_doc(report, out_dir / f"{stem}_groups_per_doc.png"))
        written.append(plot_distinct_classes(report, out_dir / f"{stem}_classes_per_doc.png"))
    elif isinstance(report, IdentificationReport):
        written.append(plot_identification(report, out_dir / f"{stem}_f1.png"))
    elif isinstance(report, AgreementReport):
        written.append(plot_agreement(report, out_dir / f"{stem}_kappa.png"))
    elif isinstance(report, GenerationReport):
        written.append(plot_generation(report, out_dir / f"{stem}_generation.png"))
    return written
