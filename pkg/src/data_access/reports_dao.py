"""Report, summary, curve and manifest files written into a run directory."""

from __future__ import annotations

import io
import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

import matplotlib
import numpy as np
import pandas as pd
from matplotlib.figure import Figure
from sklearn.metrics import precision_recall_curve, roc_curve

from ..models.entities import METRIC_NAMES, AffinityMatrix, EvalReport, MetricRecord
from .tsv import atomic_write_bytes, atomic_write_text, write_frame

MANIFEST_NAME = "manifest.json"
_SVG_SALT = "dti-graph-lab"


def report_frame(report: EvalReport) -> pd.DataFrame:
    rows = [
        [label, *record.as_dict().values()]
        for label, record in zip(report.fold_labels, report.per_fold)
    ]
    rows.append(["mean", *report.mean.as_dict().values()])
    rows.append(["std", *report.std.as_dict().values()])
    return pd.DataFrame(rows, columns=["fold", *METRIC_NAMES])


def _format_cell(mean: float, std: float) -> str:
    if math.isnan(mean):
        return "undefined"
    return f"{mean:.4f} ± {std:.4f}"


def format_summary(report: EvalReport) -> str:
    """Human-readable 'mean ± std' block."""

    lines = [
        f"mode: {report.mode}",
        f"variant: {report.variant or 'full'}",
        f"folds: {len(report.per_fold)}",
    ]
    mean: MetricRecord = report.mean
    std: MetricRecord = report.std
    width = max(len(name) for name in METRIC_NAMES)
    for name in METRIC_NAMES:
        lines.append(f"{name:<{width}}  {_format_cell(getattr(mean, name), getattr(std, name))}")
    return "\n".join(lines) + "\n"


def _figure_bytes(figure: Figure) -> bytes:
    buffer = io.BytesIO()
    with matplotlib.rc_context({"svg.hashsalt": _SVG_SALT}):
        figure.savefig(buffer, format="svg", metadata={"Date": None})
    return buffer.getvalue()


def plot_curves(report: EvalReport) -> tuple[bytes, bytes]:
    """ROC and PR figures overlaying every fold with both classes present."""

    roc = Figure(figsize=(5, 5))
    pr = Figure(figsize=(5, 5))
    roc_ax = roc.add_subplot()
    pr_ax = pr.add_subplot()
    plotted = 0
    for prediction in report.predictions:
        labels = np.asarray(prediction.labels)
        if labels.min(initial=1) == labels.max(initial=0):
            continue
        fpr, tpr, _ = roc_curve(labels, prediction.scores)
        precision, recall, _ = precision_recall_curve(labels, prediction.scores)
        roc_ax.plot(fpr, tpr, linewidth=0.8, label=prediction.label)
        pr_ax.step(recall, precision, where="post", linewidth=0.8, label=prediction.label)
        plotted += 1

    roc_ax.plot([0, 1], [0, 1], linestyle="--", color="grey", linewidth=0.6)
    roc_ax.set(xlabel="False positive rate", ylabel="True positive rate", xlim=(0, 1), ylim=(0, 1))
    roc_ax.set_title(f"ROC ({report.mode}, mean AUROC {report.mean.auroc:.3f})")
    pr_ax.set(xlabel="Recall", ylabel="Precision", xlim=(0, 1), ylim=(0, 1.02))
    pr_ax.set_title(f"PR ({report.mode}, mean AUPR {report.mean.aupr:.3f})")
    if 0 < plotted <= 12:
        roc_ax.legend(loc="lower right", fontsize=6)
        pr_ax.legend(loc="lower left", fontsize=6)
    return _figure_bytes(roc), _figure_bytes(pr)


def write_eval_outputs(report: EvalReport, out_dir: str | Path, plots: bool = True) -> list[Path]:
    """Write report, summary and curves; names carry the variant."""

    out_dir = Path(out_dir)
    variant = report.variant or "full"
    report_path = out_dir / f"report_{variant}.tsv"
    summary_path = out_dir / f"summary_{variant}.txt"
    write_frame(report_frame(report), report_path)
    atomic_write_text(summary_path, format_summary(report))
    written = [report_path, summary_path]
    if plots:
        roc_svg, pr_svg = plot_curves(report)
        roc_path = out_dir / f"roc_{variant}.svg"
        pr_path = out_dir / f"pr_{variant}.svg"
        atomic_write_bytes(roc_path, roc_svg)
        atomic_write_bytes(pr_path, pr_svg)
        written += [roc_path, pr_path]
    return written


def write_convergence(affinities: Sequence[AffinityMatrix], path: str | Path) -> None:
    rows = [
        [a.kind, a.iterations, int(a.converged), *a.errors, int(a.degenerate)] for a in affinities
    ]
    columns = ["kind", "iterations", "converged", "err1", "err2", "err3", "err4", "degenerate"]
    write_frame(pd.DataFrame(rows, columns=columns), path)


def write_training_log(losses: Sequence[float], path: str | Path) -> None:
    write_frame(pd.DataFrame({"epoch": range(len(losses)), "loss": list(losses)}), path)


def write_ranking(rows: Iterable[Sequence[Any]], columns: Sequence[str], path: str | Path) -> None:
    write_frame(pd.DataFrame(list(rows), columns=list(columns)), path)


def write_sweep_summary(rows: Sequence[dict[str, Any]], path: str | Path) -> None:
    write_frame(pd.DataFrame(list(rows)), path)


def _relative(path: Path, out_dir: Path) -> str:
    try:
        return str(path.relative_to(out_dir))
    except ValueError:
        return str(path)


def write_run_manifest(
    out_dir: str | Path,
    command: str,
    config: dict[str, Any],
    files: Iterable[str | Path],
    extra: dict[str, Any] | None = None,
) -> Path:
    """Record the resolved config and produced files; no timestamps."""

    out_dir = Path(out_dir)
    names = sorted(_relative(Path(f), out_dir) for f in files)
    manifest = {"command": command, "config": config, "files": names}
    manifest.update(extra or {})
    path = out_dir / MANIFEST_NAME
    atomic_write_text(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path
