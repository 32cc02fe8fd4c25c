"""Command that writes a deterministic synthetic dataset."""

from __future__ import annotations

from pathlib import Path

import click

from ..data_access.reports_dao import write_run_manifest
from ..data_access.seed import make_low_rank_dataset, write_dataset


@click.command("seed")
@click.argument("out_dir", type=click.Path(file_okay=False))
@click.option("--drugs", type=click.IntRange(min=2), default=30, show_default=True)
@click.option("--targets", type=click.IntRange(min=2), default=20, show_default=True)
@click.option("--rank", type=click.IntRange(min=1), default=3, show_default=True)
@click.option("--positive-fraction", type=float, default=0.2, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def seed_command(
    out_dir: str, drugs: int, targets: int, rank: int, positive_fraction: float, seed: int
):
    """Low-rank interactions with feature views and a ready lab.cfg."""

    directory = Path(out_dir)
    dataset = make_low_rank_dataset(
        n_d=drugs, n_t=targets, rank=rank, positive_fraction=positive_fraction, seed=seed
    )
    config_path = write_dataset(dataset, directory)
    files = [path for path in directory.iterdir() if path.name != "manifest.json"]
    write_run_manifest(
        directory,
        "seed",
        {
            "drugs": drugs,
            "targets": targets,
            "rank": rank,
            "positive_fraction": positive_fraction,
            "seed": seed,
        },
        files,
    )
    click.echo(
        f"Wrote {drugs} drugs, {targets} targets and "
        f"{len(dataset.interactions.positives)} positives; config at {config_path}"
    )
