"""Association-based negative sampling."""

from __future__ import annotations

import logging
import math

import numpy as np

from ..errors import DataFormatError
from ..models.entities import AffinityMatrix, InteractionSet
from .interactions_dao import build_interaction_set

logger = logging.getLogger(__name__)


def negative_scores(interactions: InteractionSet, drug_affinity: AffinityMatrix) -> np.ndarray:
    """Score every cell by its drug's max similarity to drugs known to hit the target.

    Targets without positives score 0.
    """

    matrix = interactions.matrix.astype(bool)
    similarity = np.asarray(drug_affinity.values, dtype=np.float64)
    n_d, n_t = matrix.shape
    if similarity.shape != (n_d, n_d):
        raise ValueError(f"drug affinity shape {similarity.shape} does not match {n_d} drugs")
    scores = np.zeros((n_d, n_t), dtype=np.float64)
    for j in range(n_t):
        linked = np.flatnonzero(matrix[:, j])
        if linked.size:
            scores[:, j] = similarity[:, linked].max(axis=1)
    return scores


def sample_negatives(
    interactions: InteractionSet,
    drug_affinity: AffinityMatrix,
    ratio: float,
    seed: int,
) -> InteractionSet:
    """Extend the negatives to floor(ratio * |y+|) pairs drawn from unknown pairs.

    Explicit negatives already present are kept and only the remainder is sampled.
    Candidates are taken in ascending score order; a seeded shuffle before a stable
    sort breaks ties.
    """

    if ratio <= 0:
        raise DataFormatError("sampling ratio must be positive")
    requested = math.floor(ratio * len(interactions.positives))
    if requested == 0:
        raise DataFormatError("sampling ratio yields zero negatives")
    missing = requested - len(interactions.negatives)
    if missing <= 0:
        logger.info("kept %d explicit negatives; nothing sampled", len(interactions.negatives))
        return interactions

    labeled = set(interactions.labeled_pairs)
    n_d, n_t = interactions.matrix.shape
    candidates = [(i, j) for i in range(n_d) for j in range(n_t) if (i, j) not in labeled]
    if len(candidates) < missing:
        raise DataFormatError(
            f"insufficient unknown pairs: need {missing}, only {len(candidates)} available"
        )

    scores = negative_scores(interactions, drug_affinity)
    rng = np.random.default_rng(seed)
    shuffled = rng.permutation(len(candidates))
    candidate_scores = np.array([scores[candidates[k]] for k in shuffled])
    chosen = shuffled[np.argsort(candidate_scores, kind="stable")[:missing]]
    sampled = [candidates[k] for k in chosen]
    logger.info(
        "sampled %d negatives (ratio %.3g, %d positives, %d explicit negatives)",
        len(sampled),
        ratio,
        len(interactions.positives),
        len(interactions.negatives),
    )
    return build_interaction_set(
        n_d, n_t, interactions.positives, interactions.negatives + tuple(sampled)
    )
