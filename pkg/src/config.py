"""Run configuration: typed sections, flat dotted keys and environment profiles."""

from __future__ import annotations

import dataclasses
import os
import typing
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from dotenv import dotenv_values

from .errors import ConfigError

LOSS_KINDS = ("SLF", "FLF", "WLF", "RLF")
VARIANTS = ("full", "odd", "attention", "adgl_only", "edgl_only", "no_fusion")
SPLIT_MODES = ("warm", "cold_drug", "cold_target")
ACTIVATIONS = ("relu", "identity", "tanh", "sigmoid", "leaky_relu")
SWEEP_KEYS = (
    "train.filter.k",
    "train.filter.alpha",
    "train.loss.varpi",
    "train.fusion_omega",
    "train.gcn_layers",
)


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)


@dataclass(frozen=True)
class AdmmConfig:
    """Weights and schedule of the multi-view affinity optimization."""

    beta1: float = 0.1
    beta2: float = 0.1
    lam: float = 1.0
    rho: float = 1.5
    mu0: float = 1e-3
    mu_max: float = 1e6
    epsilon: float = 1e-6
    max_iter: int = 100
    divergence_bound: float = 1e6

    def __post_init__(self) -> None:
        positive = self.beta1 > 0 and self.beta2 > 0 and self.lam > 0
        _require(positive, "admm weights must be positive")
        _require(self.rho > 1, "admm.rho must exceed 1")
        _require(0 < self.mu0 <= self.mu_max, "admm.mu0 must lie in (0, mu_max]")
        _require(self.epsilon > 0, "admm.epsilon must be positive")
        _require(self.max_iter >= 1, "admm.max_iter must be at least 1")
        _require(self.divergence_bound > 0, "admm.divergence_bound must be positive")


@dataclass(frozen=True)
class FilterConfig:
    """Polynomial filter bound K, restart weight alpha and walk parity."""

    k: int = 200
    alpha: float = 0.2
    parity: str = "even"

    def __post_init__(self) -> None:
        _require(0 < self.alpha < 1, "filter.alpha must lie in (0, 1)")
        _require(self.k >= 2, "filter.k must be at least 2")
        _require(self.parity in ("even", "odd"), "filter.parity must be even or odd")


@dataclass(frozen=True)
class LossConfig:
    kind: str = "RLF"
    varpi: float = 0.2
    gamma: float = 2.0
    clamp_eps: float = 1e-7

    def __post_init__(self) -> None:
        _require(self.kind in LOSS_KINDS, f"loss.kind must be one of {', '.join(LOSS_KINDS)}")
        _require(self.varpi > 0, "loss.varpi must be positive")
        _require(self.gamma >= 0, "loss.gamma must be nonnegative")
        _require(0 < self.clamp_eps < 0.5, "loss.clamp_eps must lie in (0, 0.5)")


@dataclass(frozen=True)
class TrainConfig:
    """Model widths, optimizer settings and the encoder variant."""

    epochs: int = 500
    learning_rate: float = 1e-3
    optimizer: str = "adam"
    seed: int = field(default=0, metadata={"flat": False})
    loss: LossConfig = field(default_factory=LossConfig)
    fusion_omega: float = 0.5
    filter: FilterConfig = field(default_factory=FilterConfig)
    gcn_layers: int = 2
    hidden_dim: int = 512
    embed_dim: int = 256
    edgl_hidden: int = 512
    activation: str = "relu"
    variant: str = "full"
    patience: int = 20
    min_delta: float = 1e-6

    def __post_init__(self) -> None:
        _require(self.epochs >= 0, "train.epochs must be nonnegative")
        _require(self.learning_rate > 0, "train.learning_rate must be positive")
        _require(self.optimizer in ("adam", "sgd"), "train.optimizer must be adam or sgd")
        _require(0 <= self.fusion_omega <= 1, "train.fusion_omega must lie in [0, 1]")
        _require(self.gcn_layers >= 1, "train.gcn_layers must be at least 1")
        _require(
            min(self.hidden_dim, self.embed_dim, self.edgl_hidden) >= 1,
            "layer widths must be positive",
        )
        _require(self.activation in ACTIVATIONS, f"train.activation must be one of {ACTIVATIONS}")
        _require(self.variant in VARIANTS, f"train.variant must be one of {', '.join(VARIANTS)}")
        _require(self.patience >= 1, "train.patience must be at least 1")


@dataclass(frozen=True)
class GraphConfig:
    threshold: float = 0.8

    def __post_init__(self) -> None:
        _require(0 <= self.threshold <= 1, "graph.threshold must lie in [0, 1]")


@dataclass(frozen=True)
class SamplingConfig:
    ratio: float = 1.0

    def __post_init__(self) -> None:
        _require(self.ratio > 0, "sampling.ratio must be positive")


@dataclass(frozen=True)
class EvalConfig:
    mode: str = "warm"
    folds: int = 10
    holdouts: tuple[str, ...] = ()
    holdout_count: int = 0
    decision_threshold: float = 0.5
    jobs: int = 1

    def __post_init__(self) -> None:
        modes = ", ".join(SPLIT_MODES)
        _require(self.mode in SPLIT_MODES, f"evaluation.mode must be one of {modes}")
        _require(self.jobs >= 1, "evaluation.jobs must be at least 1")
        _require(self.holdout_count >= 0, "evaluation.holdout_count must be nonnegative")


@dataclass(frozen=True)
class PathsConfig:
    drugs: str = "drugs.tsv"
    targets: str = "targets.tsv"
    interactions: str = "interactions.tsv"
    drug_views: tuple[str, ...] = ()
    target_views: tuple[str, ...] = ()
    drug_affinity: str = "drug_affinity.tsv"
    target_affinity: str = "target_affinity.tsv"
    checkpoint: str = ""
    out_dir: str = "runs/latest"


@dataclass(frozen=True)
class SweepConfig:
    """Grid values; an empty tuple leaves that axis at the base config value."""

    filter_k: tuple[int, ...] = ()
    filter_alpha: tuple[float, ...] = ()
    loss_varpi: tuple[float, ...] = ()
    fusion_omega: tuple[float, ...] = ()
    gcn_layers: tuple[int, ...] = ()


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs; every field has a default."""

    seed: int = 0
    admm: AdmmConfig = field(default_factory=AdmmConfig)
    graph: GraphConfig = field(default_factory=GraphConfig)
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    evaluation: EvalConfig = field(default_factory=EvalConfig)
    paths: PathsConfig = field(default_factory=PathsConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)

    def train_config(self) -> TrainConfig:
        """TrainConfig carrying the run seed."""

        return dataclasses.replace(self.train, seed=self.seed)

    def resolve_path(self, value: str, base_dir: Path | None = None) -> Path:
        path = Path(value)
        if base_dir is not None and not path.is_absolute():
            return base_dir / path
        return path


def flatten(config: Any, prefix: str = "") -> dict[str, Any]:
    """Return the dotted-key view of a config dataclass."""

    flat: dict[str, Any] = {}
    for item in dataclasses.fields(config):
        if item.metadata.get("flat", True) is False:
            continue
        value = getattr(config, item.name)
        key = f"{prefix}{item.name}"
        if dataclasses.is_dataclass(value):
            flat.update(flatten(value, prefix=f"{key}."))
        else:
            flat[key] = value
    return flat


def _coerce(raw: Any, hint: Any, key: str) -> Any:
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    try:
        if hint is bool:
            if text.lower() in ("1", "true", "yes", "on"):
                return True
            if text.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if hint is int:
            return int(text)
        if hint is float:
            return float(text)
        if typing.get_origin(hint) is tuple:
            (inner, *_rest) = typing.get_args(hint)
            parts = [part.strip() for part in text.split(",") if part.strip()]
            return tuple(_coerce(part, inner, key) for part in parts)
    except ValueError as exc:
        raise ConfigError(f"invalid value for {key}: {raw!r}") from exc
    return text


def _apply(config: Any, values: Mapping[str, Any], prefix: str = "") -> Any:
    hints = typing.get_type_hints(type(config))
    changes: dict[str, Any] = {}
    for item in dataclasses.fields(config):
        if item.metadata.get("flat", True) is False:
            continue
        key = f"{prefix}{item.name}"
        current = getattr(config, item.name)
        if dataclasses.is_dataclass(current):
            nested = {k: v for k, v in values.items() if k.startswith(f"{key}.")}
            if nested:
                changes[item.name] = _apply(current, nested, prefix=f"{key}.")
        elif key in values:
            changes[item.name] = _coerce(values[key], hints[item.name], key)
    return dataclasses.replace(config, **changes) if changes else config


def apply_overrides(config: RunConfig, values: Mapping[str, Any]) -> RunConfig:
    """Return a copy of ``config`` with dotted-key ``values`` applied."""

    known = set(flatten(config))
    unknown = sorted(key for key in values if key not in known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    return _apply(config, values)


def load_run_config(
    path: str | Path | None = None,
    overrides: Mapping[str, Any] | None = None,
    base: RunConfig | None = None,
) -> RunConfig:
    """Merge profile defaults, an optional key = value file, then flag overrides."""

    config = base or get_config()
    if path is not None:
        config_path = Path(path)
        if not config_path.is_file():
            raise ConfigError(f"config file not found: {config_path}")
        file_values = {k: v for k, v in dotenv_values(config_path).items() if v is not None}
        config = apply_overrides(config, file_values)
    if overrides:
        config = apply_overrides(config, {k: v for k, v in overrides.items() if v is not None})
    return config


def dump_run_config(config: RunConfig) -> str:
    """Serialize ``config`` in the same flat format ``load_run_config`` reads."""

    lines = []
    for key, value in sorted(flatten(config).items()):
        if isinstance(value, tuple):
            value = ",".join(str(part) for part in value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def development_config() -> RunConfig:
    """Defaults used for local runs."""

    return RunConfig()


def testing_config() -> RunConfig:
    """Small widths and short training so the suite runs in seconds."""

    return RunConfig(
        train=TrainConfig(
            epochs=60,
            learning_rate=1e-2,
            hidden_dim=32,
            embed_dim=16,
            edgl_hidden=32,
            filter=FilterConfig(k=20),
        ),
        evaluation=EvalConfig(folds=3),
    )


def production_config() -> RunConfig:
    return RunConfig()


def get_config() -> RunConfig:
    """Return the profile selected by DTI_LAB_ENV."""

    env = os.getenv("DTI_LAB_ENV", "development").lower()
    if env == "production":
        return production_config()
    if env == "testing":
        return testing_config()
    return development_config()
