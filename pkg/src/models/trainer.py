"""Model assembly, Xavier initialization, exact gradients and full-batch training."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import torch
from torch import nn

from ..config import FilterConfig, TrainConfig
from ..errors import DivergenceError
from .adgl import AdglEncoder
from .edgl import EdglEncoder, SelfAttention, even_filter, mlp2, odd_filter, self_attention
from .entities import Fold, GlobalGraph
from .graphs import GraphTensors, to_tensors
from .head import TriFactorDecoder, fuse
from .losses import compute_loss

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModelDims:
    n_d: int
    n_t: int
    hidden_dim: int = 512
    embed_dim: int = 256
    edgl_hidden: int = 512
    gcn_layers: int = 2

    @property
    def n_nodes(self) -> int:
        return self.n_d + self.n_t

    @classmethod
    def from_config(cls, n_d: int, n_t: int, config: TrainConfig) -> "ModelDims":
        return cls(
            n_d=n_d,
            n_t=n_t,
            hidden_dim=config.hidden_dim,
            embed_dim=config.embed_dim,
            edgl_hidden=config.edgl_hidden,
            gcn_layers=config.gcn_layers,
        )

    def as_dict(self) -> dict[str, int]:
        return {
            "n_d": self.n_d,
            "n_t": self.n_t,
            "hidden_dim": self.hidden_dim,
            "embed_dim": self.embed_dim,
            "edgl_hidden": self.edgl_hidden,
            "gcn_layers": self.gcn_layers,
        }


class InteractionModel(nn.Module):
    """Every learnable matrix of one encoder variant plus the decoder."""

    def __init__(self, dims: ModelDims, config: TrainConfig) -> None:
        super().__init__()
        self.dims = dims
        self.variant = config.variant
        self.omega = config.fusion_omega
        self.filter = config.filter
        self.adgl: AdglEncoder | None = None
        self.edgl: EdglEncoder | None = None
        self.attention: SelfAttention | None = None

        if self.variant != "edgl_only":
            self.adgl = AdglEncoder(
                dims.n_nodes, dims.hidden_dim, dims.embed_dim, dims.gcn_layers, config.activation
            )
        if self.variant in ("full", "odd", "no_fusion", "edgl_only"):
            in_dim = dims.n_nodes if self.variant == "edgl_only" else dims.embed_dim
            self.edgl = EdglEncoder(in_dim, dims.edgl_hidden, dims.embed_dim, config.activation)
        if self.variant == "attention":
            self.attention = SelfAttention(dims.embed_dim, dims.embed_dim)
        self.decoder = TriFactorDecoder(dims.embed_dim)

    def parity(self, filter_config: FilterConfig) -> str:
        return "odd" if self.variant == "odd" else filter_config.parity

    def embed(
        self,
        graph: GraphTensors,
        omega: float | None = None,
        filter_config: FilterConfig | None = None,
    ) -> torch.Tensor:
        """H_hat for every node."""

        omega = self.omega if omega is None else omega
        filter_config = filter_config or self.filter
        propagate = odd_filter if self.parity(filter_config) == "odd" else even_filter

        if self.variant == "edgl_only":
            return propagate(mlp2(graph.H, self.edgl), graph.P, filter_config)
        H_prime = self.adgl(graph.H, graph.G_norm)
        if self.variant == "adgl_only":
            return H_prime
        if self.variant == "attention":
            return fuse(H_prime, self_attention(H_prime, self.attention), omega)
        H_dprime = propagate(mlp2(H_prime, self.edgl), graph.P, filter_config)
        if self.variant == "no_fusion":
            return H_dprime
        return fuse(H_prime, H_dprime, omega)

    def forward(self, graph: GraphTensors) -> torch.Tensor:
        return self.decoder(self.embed(graph), graph.n_d)


def init_params(dims: ModelDims, seed: int, config: TrainConfig | None = None) -> InteractionModel:
    """Xavier-uniform weights drawn from a seeded generator; biases zero."""

    config = config or TrainConfig()
    model = InteractionModel(dims, config)
    generator = torch.Generator().manual_seed(seed)
    with torch.no_grad():
        for _name, parameter in model.named_parameters():
            if parameter.ndim == 2:
                fan_in, fan_out = parameter.shape
                bound = math.sqrt(6.0 / (fan_in + fan_out))
                draw = torch.rand(parameter.shape, generator=generator, dtype=torch.float64)
                parameter.copy_((2.0 * draw - 1.0) * bound)
            else:
                parameter.zero_()
    return model


def _tensors(graph: GlobalGraph | GraphTensors) -> GraphTensors:
    return graph if isinstance(graph, GraphTensors) else to_tensors(graph)


def forward(
    graph: GlobalGraph | GraphTensors,
    params: InteractionModel,
    config: TrainConfig | None = None,
) -> torch.Tensor:
    """H* of shape n_d x n_t; ``config`` overrides the model's omega and filter."""

    tensors = _tensors(graph)
    if config is not None and config.variant != params.variant:
        raise ValueError(f"model variant {params.variant} does not match {config.variant}")
    omega = config.fusion_omega if config is not None else None
    filter_config = config.filter if config is not None else None
    return params.decoder(params.embed(tensors, omega, filter_config), tensors.n_d)


def gradients(
    graph: GlobalGraph | GraphTensors,
    params: InteractionModel,
    batch: tuple[Sequence, Sequence],
    config: TrainConfig | None = None,
) -> dict[str, torch.Tensor]:
    """Exact loss gradients for every named parameter."""

    positives, negatives = batch
    named = list(params.named_parameters())
    loss_config = config.loss if config is not None else None
    loss = compute_loss(forward(graph, params, config), positives, negatives, loss_config)
    grads = torch.autograd.grad(loss, [p for _name, p in named])
    out = {}
    for (name, _parameter), grad in zip(named, grads):
        if not torch.isfinite(grad).all():
            raise DivergenceError(f"divergence in gradient of {name}")
        out[name] = grad
    return out


def split_labels(graph: GlobalGraph, pairs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Partition pairs into positives and negatives by the graph's A_DT block."""

    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    labels = graph.interaction_block[pairs[:, 0], pairs[:, 1]] > 0
    return pairs[labels], pairs[~labels]


def check_masked(graph: GlobalGraph, test_pairs: np.ndarray) -> None:
    """Fail when a test pair is still an edge of the training graph."""

    pairs = np.asarray(test_pairs, dtype=np.int64).reshape(-1, 2)
    if len(pairs) and (graph.interaction_block[pairs[:, 0], pairs[:, 1]] != 0).any():
        raise ValueError("test pair is visible in the training graph; mask it first")


@dataclass
class TrainingLog:
    losses: list[float] = field(default_factory=list)
    stopped_early: bool = False

    @property
    def epochs_run(self) -> int:
        return len(self.losses)


def _optimizer(model: nn.Module, config: TrainConfig) -> torch.optim.Optimizer:
    if config.optimizer == "sgd":
        return torch.optim.SGD(model.parameters(), lr=config.learning_rate)
    return torch.optim.Adam(model.parameters(), lr=config.learning_rate)


def fit(
    graph: GlobalGraph,
    split: Fold,
    config: TrainConfig,
    params: InteractionModel | None = None,
) -> tuple[InteractionModel, TrainingLog]:
    """Train on the fold's train pairs over the masked graph.

    Full batch, one optimizer step per epoch. Stops early once the best loss has not
    improved by ``min_delta`` for ``patience`` epochs.
    """

    check_masked(graph, split.test_pairs)
    positives, negatives = split_labels(graph, split.train_pairs)
    if params is None:
        dims = ModelDims.from_config(graph.n_d, graph.n_t, config)
        params = init_params(dims, config.seed, config)
    tensors = to_tensors(graph)
    log = TrainingLog()
    if config.epochs == 0:
        return params, log

    optimizer = _optimizer(params, config)
    best = math.inf
    stale = 0
    for epoch in range(config.epochs):
        optimizer.zero_grad()
        loss = compute_loss(forward(tensors, params, config), positives, negatives, config.loss)
        value = float(loss.detach())
        if not math.isfinite(value):
            raise DivergenceError(f"divergence at epoch {epoch}")
        loss.backward()
        optimizer.step()
        log.losses.append(value)
        logger.debug("%s epoch %d loss %.6g", split.label, epoch, value)

        if best - value > config.min_delta:
            best = value
            stale = 0
        else:
            stale += 1
        if stale >= config.patience:
            log.stopped_early = True
            logger.info("%s stopped early at epoch %d (loss %.6g)", split.label, epoch, value)
            break
    return params, log


def predict_scores(graph: GlobalGraph | GraphTensors, params: InteractionModel) -> np.ndarray:
    with torch.no_grad():
        return forward(graph, params).numpy().copy()
