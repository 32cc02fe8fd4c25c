"""Command that ranks candidate partners for one drug or target."""

from __future__ import annotations

import logging
from pathlib import Path

import click

from ..data_access.checkpoints_dao import load_checkpoint
from ..data_access.reports_dao import write_ranking, write_run_manifest
from ..errors import DataFormatError
from ..models.evaluation import rank_partners
from ..models.graphs import assemble_global
from ..models.trainer import predict_scores
from .common import RunContext, flat_config, pass_run, prepare_dataset, train_on_all

logger = logging.getLogger(__name__)

RANKING_COLUMNS = ("rank", "drug_id", "target_id", "score")


def _load_model(run: RunContext, checkpoint: str | None, dataset):
    source = checkpoint or run.config.paths.checkpoint
    if not source:
        model, _log = train_on_all(run, dataset)
        return model, "trained"

    directory = Path(checkpoint) if checkpoint else run.path(source)
    model, _config, manifest = load_checkpoint(directory)
    for kind, ids in (
        ("drug", dataset.entities.drug_ids),
        ("target", dataset.entities.target_ids),
    ):
        saved = manifest.get(f"{kind}_ids")
        if saved is not None and tuple(saved) != tuple(ids):
            raise DataFormatError(f"checkpoint {kind} identifiers do not match the dataset")
    logger.info("loaded %s checkpoint from %s", model.variant, directory)
    return model, str(directory)


@click.command("predict")
@pass_run("variant", "ratio", "epochs", "affinity_dir")
@click.option("--drug", "drug_id", default=None, help="Rank targets for this drug.")
@click.option("--target", "target_id", default=None, help="Rank drugs for this target.")
@click.option("--top-n", type=click.IntRange(min=1), default=10, show_default=True)
@click.option(
    "--checkpoint",
    type=click.Path(file_okay=False),
    default=None,
    help="Directory written by the train command; trains on demand when omitted.",
)
def predict_command(
    run: RunContext,
    drug_id: str | None,
    target_id: str | None,
    top_n: int,
    checkpoint: str | None,
):
    """Write predictions_<id>.tsv with the top-n unseen partners of the query."""

    if (drug_id is None) == (target_id is None):
        raise click.UsageError("pass exactly one of --drug or --target")
    query_kind, query_id = ("drug", drug_id) if drug_id is not None else ("target", target_id)

    dataset = prepare_dataset(run)
    if query_id not in dataset.entities.ids_for(query_kind):
        raise DataFormatError(f"unknown {query_kind} identifier: {query_id}")

    model, source = _load_model(run, checkpoint, dataset)
    known = dataset.interactions.matrix
    graph = assemble_global(
        dataset.drug_affinity, dataset.target_affinity, known, run.config.graph.threshold
    )
    ranking = rank_partners(
        predict_scores(graph, model), dataset.entities, query_kind, query_id, known > 0, top_n
    )

    path = run.out_dir / f"predictions_{query_id}.tsv"
    write_ranking(ranking, RANKING_COLUMNS, path)
    write_run_manifest(
        run.out_dir,
        "predict",
        flat_config(run),
        [path],
        extra={"model": source, "query": {"kind": query_kind, "id": query_id, "top_n": top_n}},
    )
    for rank, drug, target, score in ranking:
        click.echo(f"{rank:>3}  {drug}\t{target}\t{score:.6f}")
    if len(ranking) < top_n:
        click.echo(f"only {len(ranking)} candidates remain after excluding known positives")
