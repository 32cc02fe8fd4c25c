"""Deterministic synthetic datasets for demos, tests and acceptance runs."""

from __future__ import annotations

import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..models.entities import EntitySet, FeatureView, InteractionSet
from .features_dao import write_entity_set, write_feature_view
from .interactions_dao import build_interaction_set, write_interactions
from .tsv import atomic_write_text

CONFIG_NAME = "lab.cfg"


@dataclass(frozen=True)
class SyntheticDataset:
    entities: EntitySet
    drug_views: tuple[FeatureView, ...]
    target_views: tuple[FeatureView, ...]
    interactions: InteractionSet


def _latent_views(
    rng: np.random.Generator,
    latent: np.ndarray,
    entity_kind: str,
    count: int,
    dim: int,
    noise: float,
) -> tuple[FeatureView, ...]:
    views = []
    for index in range(count):
        projection = rng.normal(size=(dim, latent.shape[1]))
        values = projection @ latent.T + noise * rng.normal(size=(dim, latent.shape[0]))
        views.append(FeatureView(entity_kind, values, name=f"{entity_kind}_view_{index}"))
    return tuple(views)


def make_low_rank_dataset(
    n_d: int = 30,
    n_t: int = 20,
    rank: int = 3,
    positive_fraction: float = 0.2,
    drug_views: int = 3,
    target_views: int = 4,
    view_dim: int = 16,
    noise: float = 0.05,
    seed: int = 0,
) -> SyntheticDataset:
    """Interactions are the top cells of U V^T; every view is a noisy projection of U or V."""

    if not 0 < positive_fraction < 1:
        raise ValueError("positive_fraction must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    U = rng.normal(size=(n_d, rank))
    V = rng.normal(size=(n_t, rank))
    scores = U @ V.T
    count = max(1, round(positive_fraction * n_d * n_t))
    top = np.sort(np.argsort(-scores.ravel(), kind="stable")[:count])
    positives = [(int(cell // n_t), int(cell % n_t)) for cell in top]

    entities = EntitySet(
        drug_ids=tuple(f"D{i:03d}" for i in range(n_d)),
        target_ids=tuple(f"T{j:03d}" for j in range(n_t)),
    )
    return SyntheticDataset(
        entities=entities,
        drug_views=_latent_views(rng, U, "drug", drug_views, view_dim, noise),
        target_views=_latent_views(rng, V, "target", target_views, view_dim, noise),
        interactions=build_interaction_set(n_d, n_t, positives, []),
    )


def make_block_views(
    n: int = 20,
    views: int = 3,
    blocks: int = 2,
    dim: int = 10,
    noise: float = 0.0,
    seed: int = 0,
    entity_kind: str = "drug",
) -> tuple[list[FeatureView], np.ndarray]:
    """Views whose columns lie on one line per latent block.

    Each view gives every block its own orthonormal direction; the positive per-entity
    loadings along those directions are shared by all views. Returns the views and the
    block label of every entity.
    """

    if not 1 <= blocks <= dim:
        raise ValueError("blocks must lie in [1, dim]")
    rng = np.random.default_rng(seed)
    labels = np.arange(n) % blocks
    loadings = rng.uniform(0.5, 1.0, size=n)
    result = []
    for index in range(views):
        directions, _r = np.linalg.qr(rng.normal(size=(dim, blocks)))
        scale = rng.uniform(2.0, 4.0)
        values = scale * directions[:, labels] * loadings + noise * rng.normal(size=(dim, n))
        result.append(FeatureView(entity_kind, values, name=f"block_view_{index}"))
    return result, labels


def write_dataset(dataset: SyntheticDataset, out_dir: str | Path) -> Path:
    """Write entity lists, views, labeled pairs and a config file; returns the config path."""

    out_dir = Path(out_dir)
    write_entity_set(dataset.entities, out_dir / "drugs.tsv", out_dir / "targets.tsv")
    write_interactions(dataset.interactions, dataset.entities, out_dir / "interactions.tsv")
    view_names = {}
    for kind, views in (("drug", dataset.drug_views), ("target", dataset.target_views)):
        names = []
        for index, view in enumerate(views):
            name = f"{kind}_view_{index}.tsv"
            write_feature_view(view, dataset.entities, out_dir / name)
            names.append(name)
        view_names[kind] = ",".join(names)

    config_path = out_dir / CONFIG_NAME
    lines = [
        "paths.drugs = drugs.tsv",
        "paths.targets = targets.tsv",
        "paths.interactions = interactions.tsv",
        f"paths.drug_views = {view_names['drug']}",
        f"paths.target_views = {view_names['target']}",
        "paths.drug_affinity = drug_affinity.tsv",
        "paths.target_affinity = target_affinity.tsv",
    ]
    atomic_write_text(config_path, "\n".join(lines) + "\n")
    return config_path


if __name__ == "__main__":
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("data/synthetic")
    path = write_dataset(make_low_rank_dataset(), target)
    print(f"Synthetic dataset written; config at {path}")
