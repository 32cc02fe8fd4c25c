"""Data access helpers for labeled drug-target pairs."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pandas as pd

from ..errors import DataFormatError
from ..models.entities import EntitySet, InteractionSet, Pair
from .tsv import has_missing_cells, read_table, write_frame

LABEL_HEADER = ("drug_id", "target_id", "label")


def build_interaction_set(
    n_d: int,
    n_t: int,
    positives: list[Pair] | tuple[Pair, ...],
    negatives: list[Pair] | tuple[Pair, ...],
) -> InteractionSet:
    """Assemble an InteractionSet, checking ranges and disjointness."""

    positives = tuple((int(i), int(j)) for i, j in positives)
    negatives = tuple((int(i), int(j)) for i, j in negatives)
    for i, j in positives + negatives:
        if not (0 <= i < n_d and 0 <= j < n_t):
            raise DataFormatError(f"pair ({i}, {j}) out of range")
    if set(positives) & set(negatives):
        raise DataFormatError("positive and negative pairs overlap")
    matrix = np.zeros((n_d, n_t), dtype=np.int8)
    if positives:
        rows, cols = zip(*positives)
        matrix[list(rows), list(cols)] = 1
    return InteractionSet(matrix=matrix, positives=positives, negatives=negatives)


def parse_interactions(path: str | Path, entities: EntitySet) -> InteractionSet:
    """Read drug_id, target_id, label triples; unlisted pairs stay unknown.

    A leading header row ``drug_id target_id label`` is optional.
    """

    frame = read_table(path)
    if frame.shape[1] != 3:
        raise DataFormatError(f"{path} must have three columns: drug_id, target_id, label")
    if tuple(frame.iloc[0].tolist()) == LABEL_HEADER:
        frame = frame.iloc[1:]
    if has_missing_cells(frame):
        raise DataFormatError(f"missing cell in {path}")

    drug_index = entities.drug_index()
    target_index = entities.target_index()
    labels: dict[Pair, int] = {}
    order: list[Pair] = []
    for drug_id, target_id, raw_label in frame.itertuples(index=False, name=None):
        if drug_id not in drug_index:
            raise DataFormatError(f"unknown drug identifier: {drug_id}")
        if target_id not in target_index:
            raise DataFormatError(f"unknown target identifier: {target_id}")
        if raw_label not in ("0", "1"):
            raise DataFormatError(f"label must be 0 or 1, got {raw_label!r}")
        pair = (drug_index[drug_id], target_index[target_id])
        label = int(raw_label)
        if pair in labels:
            if labels[pair] != label:
                raise DataFormatError(f"conflicting duplicate pair: {drug_id}, {target_id}")
            continue
        labels[pair] = label
        order.append(pair)

    positives = [pair for pair in order if labels[pair] == 1]
    negatives = [pair for pair in order if labels[pair] == 0]
    return build_interaction_set(entities.n_d, entities.n_t, positives, negatives)


def write_interactions(interactions: InteractionSet, entities: EntitySet, path: str | Path) -> None:
    """Write positives then negatives, in list order, as labeled triples."""

    rows = [
        (entities.drug_ids[i], entities.target_ids[j], 1) for i, j in interactions.positives
    ] + [(entities.drug_ids[i], entities.target_ids[j], 0) for i, j in interactions.negatives]
    write_frame(pd.DataFrame(rows, columns=list(LABEL_HEADER)), path)


def shuffle_labels(interactions: InteractionSet, seed: int) -> InteractionSet:
    """Permute labels over the labeled pairs, keeping the class counts."""

    pairs = list(interactions.labeled_pairs)
    labels = np.array([1] * len(interactions.positives) + [0] * len(interactions.negatives))
    permuted = np.random.default_rng(seed).permutation(labels)
    positives = [pair for pair, label in zip(pairs, permuted) if label == 1]
    negatives = [pair for pair, label in zip(pairs, permuted) if label == 0]
    n_d, n_t = interactions.matrix.shape
    return build_interaction_set(n_d, n_t, positives, negatives)
