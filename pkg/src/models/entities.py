"""Dataclass representations of the pipeline's domain objects."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

Pair = tuple[int, int]


@dataclass(frozen=True)
class EntitySet:
    """Ordered drug and target identifiers."""

    drug_ids: tuple[str, ...]
    target_ids: tuple[str, ...]

    def __post_init__(self) -> None:
        for kind, ids in (("drug", self.drug_ids), ("target", self.target_ids)):
            if any(not identifier for identifier in ids):
                raise ValueError(f"empty {kind} identifier")
            if len(set(ids)) != len(ids):
                raise ValueError(f"duplicate {kind} identifier")

    @property
    def n_d(self) -> int:
        return len(self.drug_ids)

    @property
    def n_t(self) -> int:
        return len(self.target_ids)

    def ids_for(self, entity_kind: str) -> tuple[str, ...]:
        if entity_kind == "drug":
            return self.drug_ids
        if entity_kind == "target":
            return self.target_ids
        raise ValueError(f"unknown entity kind: {entity_kind}")

    def drug_index(self) -> dict[str, int]:
        return {identifier: i for i, identifier in enumerate(self.drug_ids)}

    def target_index(self) -> dict[str, int]:
        return {identifier: j for j, identifier in enumerate(self.target_ids)}


@dataclass(frozen=True)
class FeatureView:
    """One feature matrix of shape (dim, n); columns follow EntitySet order."""

    entity_kind: str
    values: np.ndarray
    name: str = ""

    @property
    def dim(self) -> int:
        return int(self.values.shape[0])

    @property
    def n(self) -> int:
        return int(self.values.shape[1])


@dataclass(frozen=True)
class InteractionSet:
    """Binary A_DT plus the labeled positive and negative pair lists."""

    matrix: np.ndarray
    positives: tuple[Pair, ...]
    negatives: tuple[Pair, ...]

    @property
    def labeled_pairs(self) -> tuple[Pair, ...]:
        return self.positives + self.negatives


@dataclass(frozen=True)
class Fold:
    """One train/test split; ``label`` names the fold or the held-out entity."""

    train_pairs: np.ndarray
    test_pairs: np.ndarray
    label: str


@dataclass(frozen=True)
class SplitPlan:
    mode: str
    folds: tuple[Fold, ...]
    seed: int


@dataclass(frozen=True)
class AffinityMatrix:
    """Symmetric similarity in [0, 1] with the multi-view run diagnostics."""

    values: np.ndarray
    kind: str
    iterations: int = 0
    converged: bool = False
    errors: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    degenerate: bool = False


@dataclass(frozen=True)
class GlobalGraph:
    """Affinity-enhanced global matrices of the drug-target network."""

    H: np.ndarray
    G: np.ndarray
    G_norm: np.ndarray
    P: np.ndarray
    n_d: int
    n_t: int

    @property
    def n_nodes(self) -> int:
        return self.n_d + self.n_t

    @property
    def interaction_block(self) -> np.ndarray:
        return self.G[: self.n_d, self.n_d :]


@dataclass(frozen=True)
class Dataset:
    """Inputs of a training or evaluation run."""

    entities: EntitySet
    interactions: InteractionSet
    drug_affinity: AffinityMatrix
    target_affinity: AffinityMatrix


METRIC_NAMES = ("auroc", "aupr", "f1", "acc", "recall", "specificity", "precision")


@dataclass(frozen=True)
class MetricRecord:
    auroc: float
    aupr: float
    f1: float
    acc: float
    recall: float
    specificity: float
    precision: float

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in METRIC_NAMES}


@dataclass(frozen=True)
class FoldPrediction:
    """Scores and labels of one fold's test pairs."""

    label: str
    scores: np.ndarray
    labels: np.ndarray


@dataclass
class EvalReport:
    """Per-fold metrics with their mean and sample std.

    Metrics lie in [0, 1] except where a fold has a single class: recall is NaN for a
    fold without positives, specificity for one without negatives, and AUROC and AUPR
    for either. NaN folds are left out of ``mean`` and ``std``.
    """

    mode: str
    per_fold: list[MetricRecord]
    mean: MetricRecord
    std: MetricRecord
    fold_labels: list[str] = field(default_factory=list)
    predictions: list[FoldPrediction] = field(default_factory=list)
    variant: Optional[str] = None
