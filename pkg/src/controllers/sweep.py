"""Command that evaluates the protocol over a hyperparameter grid."""

from __future__ import annotations

import itertools
import logging
from typing import Any

import click

from ..config import SWEEP_KEYS, RunConfig, apply_overrides, flatten
from ..data_access.reports_dao import (
    write_eval_outputs,
    write_run_manifest,
    write_sweep_summary,
)
from ..errors import ConfigError
from ..models.entities import METRIC_NAMES
from ..models.evaluation import run_protocol
from .common import RunContext, build_plan, flat_config, pass_run, prepare_dataset

logger = logging.getLogger(__name__)


def _sweep_field(key: str) -> str:
    """train.filter.k -> filter_k"""

    return key.removeprefix("train.").replace(".", "_")


def parse_grid(values: tuple[str, ...]) -> dict[str, list[str]]:
    grid: dict[str, list[str]] = {}
    for item in values:
        key, sep, raw = item.partition("=")
        key = key.strip()
        if not sep or key not in SWEEP_KEYS:
            raise ConfigError(f"--grid expects one of {', '.join(SWEEP_KEYS)}=v1,v2; got {item!r}")
        parts = [part.strip() for part in raw.split(",") if part.strip()]
        if not parts:
            raise ConfigError(f"--grid {key} has no values")
        grid[key] = parts
    return grid


def grid_points(config: RunConfig, flags: dict[str, list[Any]]) -> list[dict[str, Any]]:
    """Cartesian product over the sweep keys; an axis without values keeps the base value."""

    base = flatten(config)
    axes = []
    for key in SWEEP_KEYS:
        values = flags.get(key) or list(getattr(config.sweep, _sweep_field(key))) or [base[key]]
        axes.append(values)
    return [dict(zip(SWEEP_KEYS, combo)) for combo in itertools.product(*axes)]


@click.command("sweep")
@pass_run("mode", "variant", "loss", "ratio", "jobs", "folds", "epochs", "affinity_dir")
@click.option(
    "--grid",
    "grid",
    multiple=True,
    metavar="KEY=V1,V2",
    help="Grid values for one sweep key; repeatable.",
)
@click.option("--no-plots", is_flag=True, help="Skip the ROC and PR figures.")
def sweep_command(run: RunContext, grid: tuple[str, ...], no_plots: bool):
    """Write one report per grid point under point_NNN/ plus sweep_summary.tsv."""

    points = grid_points(run.config, parse_grid(grid))
    dataset = prepare_dataset(run)
    plan = build_plan(run, dataset)

    rows = []
    written = []
    for index, point in enumerate(points):
        config = apply_overrides(run.config, point)
        point_dir = run.out_dir / f"point_{index:03d}"
        logger.info("grid point %d/%d: %s", index + 1, len(points), point)
        report = run_protocol(
            dataset,
            plan,
            config.train_config(),
            graph_threshold=config.graph.threshold,
            decision_threshold=config.evaluation.decision_threshold,
            jobs=config.evaluation.jobs,
        )
        files = write_eval_outputs(report, point_dir, plots=not no_plots)
        point_manifest = write_run_manifest(
            point_dir, "sweep", flat_config(RunContext(config, run.base_dir, point_dir)), files
        )
        written += [*files, point_manifest]

        resolved = flatten(config)
        row: dict[str, Any] = {"point": index}
        row.update({key: resolved[key] for key in SWEEP_KEYS})
        for name in METRIC_NAMES:
            row[f"{name}_mean"] = getattr(report.mean, name)
            row[f"{name}_std"] = getattr(report.std, name)
        rows.append(row)
        click.echo(
            f"point {index:03d}: auroc {report.mean.auroc:.4f} aupr {report.mean.aupr:.4f}"
        )

    summary_path = run.out_dir / "sweep_summary.tsv"
    write_sweep_summary(rows, summary_path)
    written.append(summary_path)
    write_run_manifest(
        run.out_dir, "sweep", flat_config(run), written, extra={"points": len(points)}
    )
    click.echo(f"Sweep summary written to {summary_path}")
