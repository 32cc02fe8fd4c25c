"""Class-imbalance aware cross-entropy losses over labeled pairs."""

from __future__ import annotations

import numpy as np
import torch

from ..config import LossConfig
from ..errors import DivergenceError


def _gather(H_star: torch.Tensor, pairs) -> torch.Tensor:
    index = torch.as_tensor(np.asarray(pairs, dtype=np.int64).reshape(-1, 2))
    n_d, n_t = H_star.shape
    if len(index) and (
        index.min() < 0 or index[:, 0].max() >= n_d or index[:, 1].max() >= n_t
    ):
        raise ValueError("pair index out of range")
    return H_star[index[:, 0], index[:, 1]]


def compute_loss(H_star, positives, negatives, config: LossConfig | None = None) -> torch.Tensor:
    """SLF, WLF, RLF or FLF, each normalized by n_d * n_t.

    WLF weights the positive sum by |y-|/|y+|, RLF by varpi |y-|/|y+|. FLF is two-sided:
    the ratio-weighted positive term is modulated by (1 - h)^gamma and the negative term
    by h^gamma, so gamma = 0 gives WLF.
    """

    config = config or LossConfig()
    H_star = torch.as_tensor(H_star, dtype=torch.float64)
    if not torch.isfinite(H_star).all():
        raise DivergenceError()
    n_pos = len(positives)
    n_neg = len(negatives)
    if config.kind != "SLF" and n_pos == 0:
        raise ValueError(f"{config.kind} needs at least one positive pair")

    eps = config.clamp_eps
    h_pos = _gather(H_star, positives).clamp(eps, 1.0 - eps)
    h_neg = _gather(H_star, negatives).clamp(eps, 1.0 - eps)
    ratio = n_neg / n_pos if n_pos else 0.0
    log_pos = torch.log(h_pos)
    log_neg = torch.log1p(-h_neg)

    if config.kind == "SLF":
        total = log_pos.sum() + log_neg.sum()
    elif config.kind == "WLF":
        total = ratio * log_pos.sum() + log_neg.sum()
    elif config.kind == "RLF":
        total = config.varpi * ratio * log_pos.sum() + log_neg.sum()
    else:
        gamma = config.gamma
        total = ratio * ((1.0 - h_pos) ** gamma * log_pos).sum() + (h_neg**gamma * log_neg).sum()
    return -total / (H_star.shape[0] * H_star.shape[1])
