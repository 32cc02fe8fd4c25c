"""Ranking and threshold metrics plus the cross-validation protocols."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np
from scipy.stats import rankdata

from ..config import TrainConfig
from ..errors import DataFormatError, FoldFailure
from .entities import (
    METRIC_NAMES,
    Dataset,
    EntitySet,
    EvalReport,
    Fold,
    FoldPrediction,
    MetricRecord,
    SplitPlan,
)
from .graphs import assemble_global, mask_interactions
from .trainer import fit, predict_scores

logger = logging.getLogger(__name__)


def _as_arrays(scores, labels) -> tuple[np.ndarray, np.ndarray]:
    scores = np.asarray(scores, dtype=np.float64).ravel()
    labels = np.asarray(labels).astype(np.int64).ravel()
    if scores.shape != labels.shape:
        raise ValueError("scores and labels differ in length")
    if not np.isin(labels, (0, 1)).all():
        raise ValueError("labels must be 0 or 1")
    return scores, labels


def auroc(scores, labels) -> float:
    """Probability that a random positive outscores a random negative; ties count 1/2."""

    scores, labels = _as_arrays(scores, labels)
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("auroc needs both classes")
    ranks = rankdata(scores, method="average")
    return float((ranks[labels == 1].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def aupr(scores, labels) -> float:
    """Step-interpolated average precision; equal scores keep index order."""

    scores, labels = _as_arrays(scores, labels)
    n_pos = int(labels.sum())
    if n_pos == 0:
        raise ValueError("aupr needs at least one positive")
    ordered = labels[np.argsort(-scores, kind="stable")]
    hits = np.cumsum(ordered)
    precision = hits / np.arange(1, len(ordered) + 1)
    return float(precision[ordered == 1].sum() / n_pos)


def thresholded_metrics(scores, labels, threshold: float = 0.5) -> dict[str, float]:
    """F1, accuracy, recall, specificity and precision at score >= threshold.

    Precision and F1 are 0 when nothing is predicted positive. Recall is NaN without
    positive labels and specificity NaN without negative labels.
    """

    scores, labels = _as_arrays(scores, labels)
    predicted = scores >= threshold
    actual = labels == 1
    tp = int(np.sum(predicted & actual))
    fp = int(np.sum(predicted & ~actual))
    fn = int(np.sum(~predicted & actual))
    tn = int(np.sum(~predicted & ~actual))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else math.nan
    specificity = tn / (tn + fp) if tn + fp else math.nan
    if math.isnan(recall) or precision + recall == 0:
        f1 = 0.0
    else:
        f1 = 2 * precision * recall / (precision + recall)
    acc = (tp + tn) / len(labels) if len(labels) else math.nan
    return {
        "f1": f1,
        "acc": acc,
        "recall": recall,
        "specificity": specificity,
        "precision": precision,
    }


def fold_metrics(scores, labels, threshold: float = 0.5) -> MetricRecord:
    """All seven metrics; ranking metrics undefined for the fold are NaN."""

    scores, labels = _as_arrays(scores, labels)
    n_pos = int(labels.sum())
    both = 0 < n_pos < len(labels)
    return MetricRecord(
        auroc=auroc(scores, labels) if both else math.nan,
        aupr=aupr(scores, labels) if n_pos else math.nan,
        **thresholded_metrics(scores, labels, threshold),
    )


def aggregate(records: Sequence[MetricRecord]) -> tuple[MetricRecord, MetricRecord]:
    """Mean and sample standard deviation per metric, skipping NaN folds."""

    means = {}
    stds = {}
    for name in METRIC_NAMES:
        values = np.array([getattr(record, name) for record in records], dtype=np.float64)
        values = values[np.isfinite(values)]
        if values.size == 0:
            means[name] = stds[name] = math.nan
            continue
        means[name] = float(values.mean())
        stds[name] = float(values.std(ddof=1)) if values.size > 1 else 0.0
    return MetricRecord(**means), MetricRecord(**stds)


def _run_fold(
    index: int,
    fold: Fold,
    data: Dataset,
    config: TrainConfig,
    graph_threshold: float,
    decision_threshold: float,
) -> tuple[MetricRecord, FoldPrediction]:
    try:
        masked = mask_interactions(data.interactions.matrix, fold.test_pairs)
        graph = assemble_global(data.drug_affinity, data.target_affinity, masked, graph_threshold)
        model, log = fit(graph, fold, config)
        H_star = predict_scores(graph, model)
        pairs = np.asarray(fold.test_pairs, dtype=np.int64).reshape(-1, 2)
        scores = H_star[pairs[:, 0], pairs[:, 1]]
        labels = data.interactions.matrix[pairs[:, 0], pairs[:, 1]].astype(np.int64)
        record = fold_metrics(scores, labels, decision_threshold)
    except Exception as exc:
        raise FoldFailure(index, fold.label, exc) from exc
    logger.info(
        "%s: auroc %.4f aupr %.4f after %d epochs",
        fold.label,
        record.auroc,
        record.aupr,
        log.epochs_run,
    )
    return record, FoldPrediction(label=fold.label, scores=scores, labels=labels)


def run_protocol(
    data: Dataset,
    plan: SplitPlan,
    config: TrainConfig,
    graph_threshold: float = 0.8,
    decision_threshold: float = 0.5,
    jobs: int = 1,
) -> EvalReport:
    """Mask, train and score every fold of ``plan``; folds may run on ``jobs`` threads."""

    if not plan.folds:
        raise ValueError("split plan has no folds")

    def run(item: tuple[int, Fold]) -> tuple[MetricRecord, FoldPrediction]:
        index, fold = item
        return _run_fold(index, fold, data, config, graph_threshold, decision_threshold)

    items = list(enumerate(plan.folds))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, items))
    else:
        results = [run(item) for item in items]

    per_fold = [record for record, _prediction in results]
    mean, std = aggregate(per_fold)
    return EvalReport(
        mode=plan.mode,
        per_fold=per_fold,
        mean=mean,
        std=std,
        fold_labels=[fold.label for fold in plan.folds],
        predictions=[prediction for _record, prediction in results],
        variant=config.variant,
    )


def rank_partners(
    H_star: np.ndarray,
    entities: EntitySet,
    query_kind: str,
    query_id: str,
    known: np.ndarray,
    top_n: int = 10,
) -> list[tuple[int, str, str, float]]:
    """Top ``top_n`` partners of one drug or target as (rank, drug_id, target_id, score).

    Pairs marked in ``known`` are skipped. Ties in score fall back to identifier order.
    """

    if top_n < 1:
        raise ValueError("top_n must be at least 1")
    ids = entities.ids_for(query_kind)
    if query_id not in ids:
        raise DataFormatError(f"unknown {query_kind} identifier: {query_id}")
    index = ids.index(query_id)
    if query_kind == "drug":
        scores, mask, partners = H_star[index, :], known[index, :], entities.target_ids
    else:
        scores, mask, partners = H_star[:, index], known[:, index], entities.drug_ids

    candidates = sorted(
        (j for j in range(len(partners)) if not mask[j]),
        key=lambda j: (-float(scores[j]), partners[j]),
    )
    ranking = []
    for rank, j in enumerate(candidates[:top_n], start=1):
        pair = (query_id, partners[j]) if query_kind == "drug" else (partners[j], query_id)
        ranking.append((rank, pair[0], pair[1], float(scores[j])))
    return ranking
