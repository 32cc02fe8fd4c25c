"""Load the inputs a run needs from the configured paths."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Sequence

from ..config import RunConfig
from ..errors import DataFormatError
from ..models.entities import Dataset, EntitySet, FeatureView
from .features_dao import parse_affinity, parse_entity_set, parse_feature_view
from .interactions_dao import parse_interactions

logger = logging.getLogger(__name__)


def load_entities(config: RunConfig, base_dir: Path | None = None) -> EntitySet:
    return parse_entity_set(
        config.resolve_path(config.paths.drugs, base_dir),
        config.resolve_path(config.paths.targets, base_dir),
    )


def load_views(
    paths: Sequence[str | Path],
    entity_kind: str,
    entities: EntitySet,
) -> list[FeatureView]:
    """Parse every view of one entity kind, failing before anything is computed."""

    if not paths:
        raise DataFormatError(f"at least one {entity_kind} feature view is required")
    return [parse_feature_view(path, entity_kind, entities) for path in paths]


def load_dataset(config: RunConfig, base_dir: Path | None = None) -> Dataset:
    """Entities, labeled pairs and both affinity matrices."""

    entities = load_entities(config, base_dir)
    interactions = parse_interactions(
        config.resolve_path(config.paths.interactions, base_dir), entities
    )
    drug_affinity = parse_affinity(
        config.resolve_path(config.paths.drug_affinity, base_dir), "drug", entities
    )
    target_affinity = parse_affinity(
        config.resolve_path(config.paths.target_affinity, base_dir), "target", entities
    )
    logger.info(
        "loaded %d drugs, %d targets, %d positives, %d negatives",
        entities.n_d,
        entities.n_t,
        len(interactions.positives),
        len(interactions.negatives),
    )
    return Dataset(
        entities=entities,
        interactions=interactions,
        drug_affinity=drug_affinity,
        target_affinity=target_affinity,
    )
