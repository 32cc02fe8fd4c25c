"""Command that learns drug and target affinity matrices from feature views."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import click

from ..data_access.datasets import load_entities, load_views
from ..data_access.features_dao import write_affinity
from ..data_access.reports_dao import write_convergence, write_run_manifest
from ..models.affinity import run_multiview
from .common import RunContext, flat_config, pass_run


@click.command("affinity")
@pass_run("jobs")
@click.option("--drug-view", "drug_views", multiple=True, type=click.Path(dir_okay=False))
@click.option("--target-view", "target_views", multiple=True, type=click.Path(dir_okay=False))
def affinity_command(run: RunContext, drug_views: tuple[str, ...], target_views: tuple[str, ...]):
    """Write drug_affinity.tsv, target_affinity.tsv and a convergence log."""

    paths = run.config.paths
    entities = load_entities(run.config, run.base_dir)
    views = {
        "drug": load_views(drug_views or [run.path(p) for p in paths.drug_views], "drug", entities),
        "target": load_views(
            target_views or [run.path(p) for p in paths.target_views], "target", entities
        ),
    }

    kinds = ("drug", "target")
    if run.config.evaluation.jobs > 1:
        with ThreadPoolExecutor(max_workers=2) as pool:
            futures = [pool.submit(run_multiview, views[k], run.config.admm, k) for k in kinds]
            affinities = [future.result() for future in futures]
    else:
        affinities = [run_multiview(views[k], run.config.admm, k) for k in kinds]

    written = []
    for affinity in affinities:
        path = run.out_dir / f"{affinity.kind}_affinity.tsv"
        write_affinity(affinity, entities, path)
        written.append(path)
    convergence_path = run.out_dir / "convergence.tsv"
    write_convergence(affinities, convergence_path)
    written.append(convergence_path)
    write_run_manifest(run.out_dir, "affinity", flat_config(run), written)

    for affinity in affinities:
        status = "converged" if affinity.converged else "stopped"
        click.echo(
            f"{affinity.kind} affinity: {status} after {affinity.iterations} sweeps, "
            f"max error {max(affinity.errors):.3g}"
        )
        if affinity.degenerate:
            click.echo(f"warning: {affinity.kind} affinity is degenerate (all entries equal)")
