"""Warm-start fold planning and cold-start hold-out splits."""

from __future__ import annotations

from typing import Sequence

import numpy as np
from sklearn.model_selection import KFold

from ..config import SPLIT_MODES
from ..errors import DataFormatError
from ..models.entities import EntitySet, Fold, InteractionSet, SplitPlan


def _pairs_array(pairs) -> np.ndarray:
    return np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)


def _warm_folds(labeled: np.ndarray, k: int, seed: int) -> tuple[Fold, ...]:
    if k < 2:
        raise DataFormatError("warm mode needs at least 2 folds")
    if k > len(labeled):
        raise DataFormatError(f"fold count {k} exceeds labeled pair count {len(labeled)}")
    splitter = KFold(n_splits=k, shuffle=True, random_state=seed)
    return tuple(
        Fold(train_pairs=labeled[train], test_pairs=labeled[test], label=f"fold_{index}")
        for index, (train, test) in enumerate(splitter.split(labeled))
    )


def _resolve_holdouts(
    labeled: np.ndarray,
    axis: int,
    holdouts: int | Sequence[str],
    ids: Sequence[str],
    seed: int,
) -> list[int]:
    if isinstance(holdouts, (int, np.integer)):
        eligible = np.unique(labeled[:, axis])
        if not 1 <= holdouts <= len(eligible):
            raise DataFormatError(
                f"hold-out count {holdouts} outside 1..{len(eligible)} entities with labels"
            )
        chosen = np.random.default_rng(seed).choice(eligible, size=int(holdouts), replace=False)
        return sorted(int(index) for index in chosen)
    if not holdouts:
        raise DataFormatError("cold-start modes need a nonempty hold-out list")
    position = {identifier: index for index, identifier in enumerate(ids)}
    resolved = []
    for identifier in holdouts:
        if identifier not in position:
            raise DataFormatError(f"unknown hold-out identifier: {identifier}")
        resolved.append(position[identifier])
    return resolved


def plan_splits(
    interactions: InteractionSet,
    mode: str,
    k_or_holdouts: int | Sequence[str],
    seed: int,
    entities: EntitySet | None = None,
) -> SplitPlan:
    """Partition the labeled pairs into folds.

    ``warm`` shuffles and splits into k near-equal folds. ``cold_drug`` and
    ``cold_target`` make one split per held-out entity whose test set is every
    labeled pair of that entity; they take an identifier list or a count of
    entities to draw with ``seed``.
    """

    if mode not in SPLIT_MODES:
        raise DataFormatError(f"unknown split mode: {mode}")
    labeled = _pairs_array(interactions.labeled_pairs)
    if mode == "warm":
        if not isinstance(k_or_holdouts, (int, np.integer)):
            raise DataFormatError("warm mode takes a fold count")
        return SplitPlan(mode=mode, folds=_warm_folds(labeled, int(k_or_holdouts), seed), seed=seed)

    axis = 0 if mode == "cold_drug" else 1
    kind = "drug" if axis == 0 else "target"
    n_entities = interactions.matrix.shape[axis]
    if entities is not None:
        ids = entities.ids_for(kind)
    else:
        ids = tuple(f"{kind}_{index}" for index in range(n_entities))
    folds = []
    for index in _resolve_holdouts(labeled, axis, k_or_holdouts, ids, seed):
        in_test = labeled[:, axis] == index
        if not in_test.any():
            raise DataFormatError(f"hold-out {ids[index]} has no labeled pairs")
        folds.append(
            Fold(train_pairs=labeled[~in_test], test_pairs=labeled[in_test], label=ids[index])
        )
    return SplitPlan(mode=mode, folds=tuple(folds), seed=seed)
