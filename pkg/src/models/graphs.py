"""Global drug-target matrices and the bipartite propagation matrix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from .entities import AffinityMatrix, GlobalGraph


def binarize_affinity(A: AffinityMatrix | np.ndarray, threshold: float) -> np.ndarray:
    """1 where the affinity is at least ``threshold``, else 0."""

    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    values = A.values if isinstance(A, AffinityMatrix) else np.asarray(A, dtype=np.float64)
    return (values >= threshold).astype(np.float64)


def sym_normalize(M: np.ndarray) -> np.ndarray:
    """D^-1/2 M D^-1/2 with D the row sums; zero-degree nodes stay zero."""

    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if (M < 0).any():
        raise ValueError("sym_normalize requires nonnegative entries")
    degree = M.sum(axis=1)
    inv_sqrt = np.zeros_like(degree)
    positive = degree > 0
    inv_sqrt[positive] = 1.0 / np.sqrt(degree[positive])
    return inv_sqrt[:, None] * M * inv_sqrt[None, :]


def build_propagation(G_prime: np.ndarray, n_d: int, n_t: int) -> np.ndarray:
    """Zero both same-kind blocks of G', then renormalize by the new degrees."""

    G_prime = np.asarray(G_prime, dtype=np.float64)
    size = n_d + n_t
    if G_prime.shape != (size, size):
        raise ValueError(f"expected a {size}x{size} matrix, got shape {G_prime.shape}")
    bipartite = G_prime.copy()
    bipartite[:n_d, :n_d] = 0.0
    bipartite[n_d:, n_d:] = 0.0
    return sym_normalize(bipartite)


def assemble_global(
    A_DD: AffinityMatrix,
    A_TT: AffinityMatrix,
    A_DT: np.ndarray,
    threshold: float = 0.8,
) -> GlobalGraph:
    """Build H from raw affinities and G from thresholded ones, sharing the A_DT blocks."""

    A_DT = np.asarray(A_DT, dtype=np.float64)
    n_d, n_t = A_DT.shape
    if A_DD.values.shape != (n_d, n_d):
        raise ValueError(f"drug affinity shape {A_DD.values.shape} does not match {n_d} drugs")
    if A_TT.values.shape != (n_t, n_t):
        raise ValueError(f"target affinity shape {A_TT.values.shape} does not match {n_t} targets")

    H = np.block([[A_DD.values, A_DT], [A_DT.T, A_TT.values]])
    G = np.block(
        [
            [binarize_affinity(A_DD, threshold), A_DT],
            [A_DT.T, binarize_affinity(A_TT, threshold)],
        ]
    )
    G_norm = sym_normalize(G)
    P = build_propagation(G_norm, n_d, n_t)
    return GlobalGraph(H=H, G=G, G_norm=G_norm, P=P, n_d=n_d, n_t=n_t)


def mask_interactions(A_DT: np.ndarray, test_pairs: np.ndarray) -> np.ndarray:
    """Copy of A_DT with every test pair set to 0."""

    masked = np.array(A_DT, dtype=np.float64, copy=True)
    pairs = np.asarray(test_pairs, dtype=np.int64).reshape(-1, 2)
    if len(pairs):
        masked[pairs[:, 0], pairs[:, 1]] = 0.0
    return masked


def normalized_laplacian(graph: GlobalGraph) -> np.ndarray:
    """D'^-1/2 (D' - A') D'^-1/2 with A' the bipartite part of G_norm; isolated nodes get 1."""

    bipartite = graph.G_norm.copy()
    bipartite[: graph.n_d, : graph.n_d] = 0.0
    bipartite[graph.n_d :, graph.n_d :] = 0.0
    degree = bipartite.sum(axis=1)
    laplacian = np.diag(degree) - bipartite
    inv_sqrt = np.zeros_like(degree)
    positive = degree > 0
    inv_sqrt[positive] = 1.0 / np.sqrt(degree[positive])
    scaled = inv_sqrt[:, None] * laplacian * inv_sqrt[None, :]
    isolated = np.flatnonzero(~positive)
    scaled[isolated, isolated] = 1.0
    return scaled


@dataclass(frozen=True)
class GraphTensors:
    H: torch.Tensor
    G_norm: torch.Tensor
    P: torch.Tensor
    n_d: int
    n_t: int


def to_tensors(graph: GlobalGraph) -> GraphTensors:
    """float64 torch copies of the matrices the encoders read."""

    def as_tensor(matrix: np.ndarray) -> torch.Tensor:
        return torch.as_tensor(np.ascontiguousarray(matrix), dtype=torch.float64)

    return GraphTensors(
        H=as_tensor(graph.H),
        G_norm=as_tensor(graph.G_norm),
        P=as_tensor(graph.P),
        n_d=graph.n_d,
        n_t=graph.n_t,
    )
