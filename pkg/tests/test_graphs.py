"""Global matrix assembly, normalization and the propagation matrix."""

from __future__ import annotations

import numpy as np
import pytest

from src.models.entities import AffinityMatrix
from src.models.graphs import (
    assemble_global,
    binarize_affinity,
    build_propagation,
    mask_interactions,
    normalized_laplacian,
    sym_normalize,
    to_tensors,
)


def _affinity(values, kind="drug") -> AffinityMatrix:
    return AffinityMatrix(values=np.asarray(values, dtype=np.float64), kind=kind)


def test_binarize_includes_the_threshold():
    np.testing.assert_array_equal(binarize_affinity(np.array([[0.8, 0.79]]), 0.8), [[1.0, 0.0]])


def test_binarize_at_zero_is_all_ones(rng):
    assert binarize_affinity(rng.uniform(size=(3, 3)), 0.0).all()


def test_one_by_one_assembly():
    one = _affinity([[1.0]])
    graph = assemble_global(one, _affinity([[1.0]], "target"), np.array([[1.0]]))
    np.testing.assert_array_equal(graph.H, [[1.0, 1.0], [1.0, 1.0]])
    np.testing.assert_array_equal(graph.G, graph.H)
    np.testing.assert_array_equal(graph.interaction_block, [[1.0]])


def test_zero_interactions_give_block_diagonal_graph(rng):
    A_DD = _affinity(rng.uniform(0.5, 1.0, size=(3, 3)))
    A_TT = _affinity(rng.uniform(0.5, 1.0, size=(2, 2)), "target")
    graph = assemble_global(A_DD, A_TT, np.zeros((3, 2)), threshold=0.4)
    assert not graph.G[:3, 3:].any() and not graph.G[3:, :3].any()
    assert graph.G[:3, :3].all() and graph.G[3:, 3:].all()
    assert not graph.P.any()


def test_assembly_rejects_mismatched_shapes():
    with pytest.raises(ValueError, match="drug affinity"):
        assemble_global(_affinity(np.eye(2)), _affinity(np.eye(2), "target"), np.zeros((3, 2)))


@pytest.mark.parametrize(
    ("M", "expected"),
    [
        ([[0.0, 1.0], [1.0, 0.0]], [[0.0, 1.0], [1.0, 0.0]]),
        ([[1.0, 1.0], [1.0, 1.0]], [[0.5, 0.5], [0.5, 0.5]]),
    ],
)
def test_sym_normalize_examples(M, expected):
    np.testing.assert_allclose(sym_normalize(np.array(M)), expected)


def test_sym_normalize_keeps_isolated_nodes_at_zero():
    M = np.array([[1.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 0.0]])
    out = sym_normalize(M)
    assert np.isfinite(out).all()
    assert not out[2].any() and not out[:, 2].any()


def test_sym_normalize_rejects_negative_entries():
    with pytest.raises(ValueError, match="nonnegative"):
        sym_normalize(np.array([[0.0, -1.0], [-1.0, 0.0]]))


def test_propagation_zeroes_same_kind_blocks(rng):
    G_prime = rng.uniform(size=(5, 5))
    G_prime = G_prime + G_prime.T
    P = build_propagation(G_prime, 2, 3)
    assert not P[:2, :2].any()
    assert not P[2:, 2:].any()
    np.testing.assert_allclose(P, P.T)


def test_propagation_of_single_pair():
    G_prime = np.array([[0.5, 1.0], [1.0, 0.5]])
    np.testing.assert_allclose(build_propagation(G_prime, 1, 1), [[0.0, 1.0], [1.0, 0.0]])


def test_propagation_rejects_wrong_size():
    with pytest.raises(ValueError):
        build_propagation(np.eye(3), 1, 1)


def test_masking_removes_test_edges(global_graph, dataset):
    positives = np.array(dataset.interactions.positives[:3])
    masked = mask_interactions(dataset.interactions.matrix, positives)
    assert not masked[positives[:, 0], positives[:, 1]].any()
    assert masked.sum() == dataset.interactions.matrix.sum() - 3
    graph = assemble_global(dataset.drug_affinity, dataset.target_affinity, masked)
    assert not graph.interaction_block[positives[:, 0], positives[:, 1]].any()
    assert not graph.H[: graph.n_d, graph.n_d :][positives[:, 0], positives[:, 1]].any()


def _connected_graph(rng: np.random.Generator, n_d: int = 6, n_t: int = 4):
    def affinity(n: int, kind: str) -> AffinityMatrix:
        values = rng.uniform(size=(n, n))
        return _affinity((values + values.T) / 2, kind)

    A_DT = (rng.uniform(size=(n_d, n_t)) > 0.6).astype(np.float64)
    A_DT[np.arange(n_d), np.arange(n_d) % n_t] = 1.0
    return assemble_global(affinity(n_d, "drug"), affinity(n_t, "target"), A_DT, threshold=0.5)


@pytest.mark.parametrize("seed", range(5))
def test_propagation_spectrum_lies_in_unit_interval(seed):
    graph = _connected_graph(np.random.default_rng(seed))
    assert graph.n_nodes == 10
    eigenvalues = np.linalg.eigvalsh(graph.P)
    assert np.max(np.abs(eigenvalues)) <= 1.0 + 1e-9


def test_propagation_alternates_between_kinds(rng):
    graph = _connected_graph(rng)
    x = np.zeros(graph.n_nodes)
    x[: graph.n_d] = rng.normal(size=graph.n_d)
    once = graph.P @ x
    twice = graph.P @ once
    assert not once[: graph.n_d].any()
    assert once[graph.n_d :].any()
    assert not twice[graph.n_d :].any()


def test_sym_normalize_preserves_symmetry(rng):
    M = rng.uniform(size=(7, 7))
    M = M + M.T
    M[3] = M[:, 3] = 0.0
    out = sym_normalize(M)
    np.testing.assert_allclose(out, out.T, rtol=1e-14, atol=0.0)


def test_laplacian_matches_identity_minus_propagation(rng):
    graph = _connected_graph(rng)
    L = normalized_laplacian(graph)
    assert np.abs(L - (np.eye(graph.n_nodes) - graph.P)).max() < 1e-12
    assert (L[: graph.n_d, graph.n_d :] != 0).any()


def test_laplacian_and_tensors(global_graph):
    L = normalized_laplacian(global_graph)
    np.testing.assert_allclose(L + global_graph.P, np.eye(global_graph.n_nodes))
    tensors = to_tensors(global_graph)
    assert tensors.H.dtype.is_floating_point and tensors.H.dtype.itemsize == 8
    assert tuple(tensors.P.shape) == (global_graph.n_nodes, global_graph.n_nodes)
