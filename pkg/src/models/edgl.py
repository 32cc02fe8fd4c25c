"""Two-layer transform, even/odd polynomial filters and the self-attention variant."""

from __future__ import annotations

import math

import torch
from torch import nn

from ..config import FilterConfig
from ..errors import DivergenceError
from .adgl import activation_fn


class EdglEncoder(nn.Module):
    """Weights of the two affine stages; dims in_dim -> hidden -> out_dim."""

    def __init__(
        self, in_dim: int, hidden_dim: int, out_dim: int, activation: str = "relu"
    ) -> None:
        super().__init__()
        self.activation = activation
        self.w0 = nn.Parameter(torch.zeros(in_dim, hidden_dim, dtype=torch.float64))
        self.b0 = nn.Parameter(torch.zeros(hidden_dim, dtype=torch.float64))
        self.w1 = nn.Parameter(torch.zeros(hidden_dim, out_dim, dtype=torch.float64))
        self.b1 = nn.Parameter(torch.zeros(out_dim, dtype=torch.float64))

    def forward(self, X0: torch.Tensor) -> torch.Tensor:
        return mlp2(X0, self)


def mlp2(X0: torch.Tensor, params: EdglEncoder) -> torch.Tensor:
    """sigma(sigma(X0 W0 + b0) W1 + b1)."""

    if X0.shape[1] != params.w0.shape[0]:
        raise ValueError(f"input width {X0.shape[1]} does not match {params.w0.shape[0]}")
    sigma = activation_fn(params.activation)
    return sigma(sigma(X0 @ params.w0 + params.b0) @ params.w1 + params.b1)


def filter_coefficients(config: FilterConfig, parity: str = "even") -> list[float]:
    """alpha (1 - alpha)^k for every term the filter keeps."""

    terms = config.k // 2 if parity == "even" else config.k // 2 - 1
    return [config.alpha * (1.0 - config.alpha) ** k for k in range(terms + 1)]


def _check_propagation(X_hat: torch.Tensor, P: torch.Tensor) -> None:
    if P.shape[0] != P.shape[1] or P.shape[1] != X_hat.shape[0]:
        raise ValueError(f"propagation {tuple(P.shape)} does not match {tuple(X_hat.shape)}")


def _accumulate(Z: torch.Tensor, P: torch.Tensor, coefficients: list[float]) -> torch.Tensor:
    out = torch.zeros_like(Z)
    for index, coefficient in enumerate(coefficients):
        if index:
            Z = P @ (P @ Z)
        out = out + coefficient * Z
    if not torch.isfinite(out).all():
        raise DivergenceError()
    return out


def even_filter(X_hat: torch.Tensor, P: torch.Tensor, config: FilterConfig) -> torch.Tensor:
    """Sum of alpha_k P^(2k) X_hat for k = 0..K//2, two products per term."""

    _check_propagation(X_hat, P)
    return _accumulate(X_hat, P, filter_coefficients(config, "even"))


def odd_filter(X_hat: torch.Tensor, P: torch.Tensor, config: FilterConfig) -> torch.Tensor:
    """Sum of alpha_k P^(2k+1) X_hat for k = 0..K//2 - 1."""

    _check_propagation(X_hat, P)
    return _accumulate(P @ X_hat, P, filter_coefficients(config, "odd"))


class SelfAttention(nn.Module):
    def __init__(self, in_dim: int, key_dim: int) -> None:
        super().__init__()
        self.wq = nn.Parameter(torch.zeros(in_dim, key_dim, dtype=torch.float64))
        self.wk = nn.Parameter(torch.zeros(in_dim, key_dim, dtype=torch.float64))
        self.wv = nn.Parameter(torch.zeros(in_dim, key_dim, dtype=torch.float64))

    def forward(self, H_prime: torch.Tensor) -> torch.Tensor:
        return self_attention(H_prime, self)


def self_attention(H_prime: torch.Tensor, params: SelfAttention) -> torch.Tensor:
    """softmax(Q K^T / sqrt(m)) V with row-wise softmax."""

    if H_prime.shape[1] != params.wq.shape[0]:
        raise ValueError(f"input width {H_prime.shape[1]} does not match {params.wq.shape[0]}")
    Q = H_prime @ params.wq
    K = H_prime @ params.wk
    V = H_prime @ params.wv
    weights = torch.softmax(Q @ K.T / math.sqrt(params.wq.shape[1]), dim=1)
    return weights @ V
