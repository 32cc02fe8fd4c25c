"""Options and pipeline steps shared by the command modules."""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Callable

import click
import numpy as np

from ..config import (
    LOSS_KINDS,
    SPLIT_MODES,
    VARIANTS,
    RunConfig,
    apply_overrides,
    flatten,
    load_run_config,
)
from ..data_access.datasets import load_dataset
from ..data_access.interactions_dao import shuffle_labels
from ..data_access.sampling import sample_negatives
from ..data_access.splits import plan_splits
from ..errors import ConfigError
from ..models.entities import Dataset, Fold, SplitPlan
from ..models.graphs import assemble_global
from ..models.trainer import InteractionModel, TrainingLog, fit

logger = logging.getLogger(__name__)

# flag name -> dotted config key
FLAG_KEYS = {
    "seed": "seed",
    "mode": "evaluation.mode",
    "variant": "train.variant",
    "loss": "train.loss.kind",
    "ratio": "sampling.ratio",
    "jobs": "evaluation.jobs",
    "folds": "evaluation.folds",
    "epochs": "train.epochs",
}


@dataclass(frozen=True)
class RunContext:
    config: RunConfig
    base_dir: Path | None
    out_dir: Path

    def path(self, value: str) -> Path:
        return self.config.resolve_path(value, self.base_dir)

    def with_overrides(self, values: dict[str, Any]) -> "RunContext":
        return replace(self, config=apply_overrides(self.config, values))


def _parse_assignments(values: tuple[str, ...]) -> dict[str, str]:
    parsed = {}
    for item in values:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"expected key=value, got {item!r}")
        parsed[key.strip()] = value.strip()
    return parsed


_COMMON_OPTIONS = (
    click.option(
        "--config",
        "config_path",
        type=click.Path(dir_okay=False),
        default=None,
        help="key = value config file with dotted keys.",
    ),
    click.option(
        "--set",
        "assignments",
        multiple=True,
        metavar="KEY=VALUE",
        help="Override any config key; repeatable.",
    ),
    click.option("--out-dir", default=None, help="Run directory for all outputs."),
    click.option("--seed", type=int, default=None),
)

_SHORTCUTS = {
    "mode": click.option("--mode", type=click.Choice(SPLIT_MODES), default=None),
    "variant": click.option("--variant", type=click.Choice(VARIANTS), default=None),
    "loss": click.option("--loss", type=click.Choice(LOSS_KINDS), default=None),
    "ratio": click.option("--ratio", type=float, default=None, help="Negatives per positive."),
    "jobs": click.option("--jobs", type=int, default=None, help="Folds run in parallel."),
    "folds": click.option("--folds", type=int, default=None),
    "epochs": click.option("--epochs", type=int, default=None),
    "affinity_dir": click.option(
        "--affinity-dir",
        type=click.Path(file_okay=False),
        default=None,
        help="Directory holding drug_affinity.tsv and target_affinity.tsv.",
    ),
}


def run_options(*flags: str) -> Callable:
    """Attach --config, --set, --out-dir, --seed and the named shortcut flags."""

    def decorate(command: Callable) -> Callable:
        for option in reversed(_COMMON_OPTIONS + tuple(_SHORTCUTS[name] for name in flags)):
            command = option(command)
        return command

    return decorate


def resolve_run(
    ctx: click.Context, options: dict[str, Any], extra: dict[str, Any] | None = None
) -> RunContext:
    """Profile defaults < config file < --set < shortcut flags."""

    overrides: dict[str, Any] = _parse_assignments(options.get("assignments", ()))
    for flag, key in FLAG_KEYS.items():
        if options.get(flag) is not None:
            overrides[key] = options[flag]
    if options.get("out_dir"):
        overrides["paths.out_dir"] = options["out_dir"]
    if options.get("affinity_dir"):
        directory = Path(options["affinity_dir"]).resolve()
        overrides["paths.drug_affinity"] = str(directory / "drug_affinity.tsv")
        overrides["paths.target_affinity"] = str(directory / "target_affinity.tsv")
    overrides.update(extra or {})

    base = (ctx.obj or {}).get("base_config")
    config_path = options.get("config_path")
    config = load_run_config(config_path, overrides, base=base)
    base_dir = Path(config_path).resolve().parent if config_path else None
    return RunContext(config=config, base_dir=base_dir, out_dir=Path(config.paths.out_dir))


def flat_config(run: RunContext) -> dict[str, Any]:
    return {
        key: list(value) if isinstance(value, tuple) else value
        for key, value in flatten(run.config).items()
    }


def prepare_dataset(run: RunContext, shuffled: bool = False) -> Dataset:
    """Load inputs and top up negatives to the configured ratio."""

    dataset = load_dataset(run.config, run.base_dir)
    interactions = sample_negatives(
        dataset.interactions, dataset.drug_affinity, run.config.sampling.ratio, run.config.seed
    )
    if shuffled:
        interactions = shuffle_labels(interactions, run.config.seed)
    return replace(dataset, interactions=interactions)


def build_plan(run: RunContext, dataset: Dataset) -> SplitPlan:
    evaluation = run.config.evaluation
    if evaluation.mode == "warm":
        k_or_holdouts: Any = evaluation.folds
    elif evaluation.holdouts:
        k_or_holdouts = list(evaluation.holdouts)
    elif evaluation.holdout_count:
        k_or_holdouts = evaluation.holdout_count
    else:
        raise ConfigError("cold-start modes need evaluation.holdouts or evaluation.holdout_count")
    return plan_splits(
        dataset.interactions, evaluation.mode, k_or_holdouts, run.config.seed, dataset.entities
    )


def train_on_all(run: RunContext, dataset: Dataset) -> tuple[InteractionModel, TrainingLog]:
    """Fit on every labeled pair over the unmasked graph."""

    labeled = np.asarray(dataset.interactions.labeled_pairs, dtype=np.int64).reshape(-1, 2)
    fold = Fold(train_pairs=labeled, test_pairs=np.empty((0, 2), dtype=np.int64), label="all")
    graph = assemble_global(
        dataset.drug_affinity,
        dataset.target_affinity,
        dataset.interactions.matrix,
        run.config.graph.threshold,
    )
    return fit(graph, fold, run.config.train_config())


def pass_run(*flags: str) -> Callable:
    """Decorator: add the run options and hand the command a resolved RunContext."""

    def decorate(command: Callable) -> Callable:
        @run_options(*flags)
        @click.pass_context
        @functools.wraps(command)
        def wrapper(ctx: click.Context, **options: Any) -> Any:
            keys = {"config_path", "assignments", "out_dir", "seed", *flags}
            run_keys = {key: options.pop(key) for key in list(options) if key in keys}
            return command(resolve_run(ctx, run_keys), **options)

        return wrapper

    return decorate
