"""Global graph convolution over the affinity-enhanced network."""

from __future__ import annotations

from typing import Callable

import torch
import torch.nn.functional as F
from torch import nn

from ..errors import DivergenceError

Activation = Callable[[torch.Tensor], torch.Tensor]

_ACTIVATIONS: dict[str, Activation] = {
    "relu": torch.relu,
    "identity": lambda x: x,
    "tanh": torch.tanh,
    "sigmoid": torch.sigmoid,
    "leaky_relu": F.leaky_relu,
}


def activation_fn(name: str) -> Activation:
    try:
        return _ACTIVATIONS[name]
    except KeyError as exc:
        raise ValueError(f"unknown activation: {name}") from exc


def gcn_layer(
    Hl: torch.Tensor,
    G_norm: torch.Tensor,
    W: torch.Tensor,
    activation: Activation | str = "relu",
) -> torch.Tensor:
    """activation(G_norm @ Hl @ W)."""

    if isinstance(activation, str):
        activation = activation_fn(activation)
    if G_norm.shape[0] != G_norm.shape[1] or G_norm.shape[1] != Hl.shape[0]:
        raise ValueError(f"graph {tuple(G_norm.shape)} does not match features {tuple(Hl.shape)}")
    if Hl.shape[1] != W.shape[0]:
        raise ValueError(f"features {tuple(Hl.shape)} do not chain into weight {tuple(W.shape)}")
    out = activation(G_norm @ Hl @ W)
    if not torch.isfinite(out).all():
        raise DivergenceError()
    return out


def layer_dims(in_dim: int, hidden_dim: int, out_dim: int, layers: int) -> list[tuple[int, int]]:
    """(fan_in, fan_out) per layer: in -> hidden -> ... -> hidden -> out."""

    if layers < 1:
        raise ValueError("at least one graph convolution layer is required")
    widths = [in_dim] + [hidden_dim] * (layers - 1) + [out_dim]
    return list(zip(widths[:-1], widths[1:]))


class AdglEncoder(nn.Module):
    """Stacked graph convolutions; hidden layers use ``activation``, the last is linear."""

    def __init__(
        self,
        in_dim: int,
        hidden_dim: int,
        out_dim: int,
        layers: int = 2,
        activation: str = "relu",
    ) -> None:
        super().__init__()
        self.activation = activation
        self.weights = nn.ParameterList(
            nn.Parameter(torch.zeros(fan_in, fan_out, dtype=torch.float64))
            for fan_in, fan_out in layer_dims(in_dim, hidden_dim, out_dim, layers)
        )

    @property
    def out_dim(self) -> int:
        return int(self.weights[-1].shape[1])

    def forward(self, H: torch.Tensor, G_norm: torch.Tensor) -> torch.Tensor:
        hidden = activation_fn(self.activation)
        out = H
        last = len(self.weights) - 1
        for index, W in enumerate(self.weights):
            out = gcn_layer(out, G_norm, W, hidden if index < last else "identity")
        return out


def adgl_forward(graph, params: AdglEncoder) -> torch.Tensor:
    """H' for every node; rows [:n_d] are drugs and the rest targets."""

    H = torch.as_tensor(graph.H, dtype=torch.float64)
    G_norm = torch.as_tensor(graph.G_norm, dtype=torch.float64)
    return params(H, G_norm)
