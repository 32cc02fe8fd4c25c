"""Command that runs the warm-start or cold-start protocol."""

from __future__ import annotations

import click

from ..data_access.reports_dao import format_summary, write_eval_outputs, write_run_manifest
from ..models.evaluation import run_protocol
from .common import RunContext, build_plan, flat_config, pass_run, prepare_dataset


@click.command("evaluate")
@pass_run("mode", "variant", "loss", "ratio", "jobs", "folds", "epochs", "affinity_dir")
@click.option("--holdout", "holdouts", multiple=True, help="Entity id to hold out; repeatable.")
@click.option("--shuffle-labels", is_flag=True, help="Permutation-null control.")
@click.option("--no-plots", is_flag=True, help="Skip the ROC and PR figures.")
def evaluate_command(
    run: RunContext, holdouts: tuple[str, ...], shuffle_labels: bool, no_plots: bool
):
    """Write report_<variant>.tsv, summary_<variant>.txt and ROC/PR figures."""

    if holdouts:
        run = run.with_overrides({"evaluation.holdouts": holdouts})
    dataset = prepare_dataset(run, shuffled=shuffle_labels)
    plan = build_plan(run, dataset)
    config = run.config
    report = run_protocol(
        dataset,
        plan,
        config.train_config(),
        graph_threshold=config.graph.threshold,
        decision_threshold=config.evaluation.decision_threshold,
        jobs=config.evaluation.jobs,
    )
    written = write_eval_outputs(report, run.out_dir, plots=not no_plots)
    write_run_manifest(
        run.out_dir,
        "evaluate",
        flat_config(run),
        written,
        extra={"shuffled_labels": shuffle_labels},
    )
    click.echo(format_summary(report), nl=False)
