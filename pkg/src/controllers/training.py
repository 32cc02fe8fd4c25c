"""Command that trains on every labeled pair and saves a checkpoint."""

from __future__ import annotations

import click

from ..data_access.checkpoints_dao import save_checkpoint
from ..data_access.reports_dao import write_run_manifest, write_training_log
from .common import RunContext, flat_config, pass_run, prepare_dataset, train_on_all


@click.command("train")
@pass_run("variant", "loss", "ratio", "epochs", "affinity_dir")
def train_command(run: RunContext):
    """Fit the model on all labeled pairs; writes checkpoint/ and training_log.tsv."""

    dataset = prepare_dataset(run)
    model, log = train_on_all(run, dataset)
    checkpoint_dir = run.out_dir / "checkpoint"
    manifest_path = save_checkpoint(
        model,
        run.config.train_config(),
        checkpoint_dir,
        extra={
            "drug_ids": list(dataset.entities.drug_ids),
            "target_ids": list(dataset.entities.target_ids),
        },
    )
    log_path = run.out_dir / "training_log.tsv"
    write_training_log(log.losses, log_path)
    write_run_manifest(
        run.out_dir,
        "train",
        flat_config(run),
        [manifest_path, log_path],
        extra={"epochs_run": log.epochs_run, "stopped_early": log.stopped_early},
    )
    final = f"{log.losses[-1]:.6g}" if log.losses else "n/a"
    click.echo(f"Trained {log.epochs_run} epochs (final loss {final})")
    click.echo(f"Checkpoint written to {checkpoint_dir}")
