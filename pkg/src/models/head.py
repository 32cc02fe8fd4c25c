"""Residual fusion and the tri-factorization decoder."""

from __future__ import annotations

import torch
from torch import nn


def fuse(H_prime: torch.Tensor, H_dprime: torch.Tensor, omega: float) -> torch.Tensor:
    """omega * H' + (1 - omega) * H''."""

    if H_prime.shape != H_dprime.shape:
        raise ValueError(f"cannot fuse {tuple(H_prime.shape)} with {tuple(H_dprime.shape)}")
    if not 0.0 <= omega <= 1.0:
        raise ValueError("omega must lie in [0, 1]")
    if omega == 1.0:
        return H_prime
    if omega == 0.0:
        return H_dprime
    return omega * H_prime + (1.0 - omega) * H_dprime


def decode_logits(H_hat_D: torch.Tensor, H_hat_T: torch.Tensor, wl: torch.Tensor) -> torch.Tensor:
    if not (H_hat_D.shape[1] == wl.shape[0] and wl.shape[1] == H_hat_T.shape[1]):
        raise ValueError(
            f"cannot decode {tuple(H_hat_D.shape)} x {tuple(wl.shape)} x {tuple(H_hat_T.shape)}^T"
        )
    return H_hat_D @ wl @ H_hat_T.T


def decode(H_hat_D: torch.Tensor, H_hat_T: torch.Tensor, wl: torch.Tensor) -> torch.Tensor:
    """sigmoid(H_D W H_T^T), shape n_d x n_t."""

    return torch.sigmoid(decode_logits(H_hat_D, H_hat_T, wl))


class TriFactorDecoder(nn.Module):
    def __init__(self, dim: int) -> None:
        super().__init__()
        self.wl = nn.Parameter(torch.zeros(dim, dim, dtype=torch.float64))

    def forward(self, H_hat: torch.Tensor, n_d: int) -> torch.Tensor:
        return decode(H_hat[:n_d], H_hat[n_d:], self.wl)
