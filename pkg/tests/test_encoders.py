"""Graph convolution, the two-stage transform, polynomial filters and attention."""

from __future__ import annotations

import numpy as np
import pytest
import torch
from hypothesis import given, settings
from hypothesis import strategies as st

from src.config import FilterConfig
from src.models.adgl import AdglEncoder, adgl_forward, gcn_layer
from src.models.edgl import (
    EdglEncoder,
    SelfAttention,
    even_filter,
    filter_coefficients,
    mlp2,
    odd_filter,
    self_attention,
)
from src.models.graphs import build_propagation, sym_normalize


def t(values) -> torch.Tensor:
    return torch.as_tensor(np.asarray(values, dtype=np.float64))


def _set(parameter: torch.nn.Parameter, values) -> None:
    with torch.no_grad():
        parameter.copy_(t(values))


def _bipartite(rng: np.random.Generator, n_d: int, n_t: int) -> torch.Tensor:
    size = n_d + n_t
    G = (rng.uniform(size=(size, size)) > 0.5).astype(np.float64)
    G = np.maximum(G, G.T)
    return t(build_propagation(sym_normalize(G), n_d, n_t))


def test_gcn_identity_graph_and_weight_pass_features_through():
    Hl = t([[0.5, 2.0], [1.0, 0.0]])
    np.testing.assert_array_equal(gcn_layer(Hl, t(np.eye(2)), t(np.eye(2))).numpy(), Hl.numpy())


def test_gcn_relu_clamps_negative_entries():
    out = gcn_layer(t([[-1.0, 2.0]]), t([[1.0]]), t(np.eye(2)), "relu")
    np.testing.assert_array_equal(out.numpy(), [[0.0, 2.0]])


def test_gcn_on_path_graph_matches_normalized_column():
    path = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]])
    G_norm = sym_normalize(path)
    out = gcn_layer(t([[1.0], [0.0], [0.0]]), t(G_norm), t([[1.0]]), "identity")
    np.testing.assert_allclose(out.numpy()[:, 0], G_norm[:, 0])


def test_gcn_shape_mismatch():
    with pytest.raises(ValueError):
        gcn_layer(t(np.ones((3, 2))), t(np.eye(3)), t(np.eye(3)))


def test_adgl_zero_weights_give_zero_output(global_graph):
    encoder = AdglEncoder(global_graph.n_nodes, 8, 4)
    out = adgl_forward(global_graph, encoder)
    assert tuple(out.shape) == (global_graph.n_nodes, 4)
    assert not out.detach().numpy().any()


def test_adgl_is_permutation_equivariant(rng):
    n = 8
    G = rng.uniform(size=(n, n))
    G_norm = sym_normalize(G + G.T)
    H = rng.normal(size=(n, n))
    encoder = AdglEncoder(n, 6, 3, layers=2, activation="tanh")
    for weight in encoder.weights:
        _set(weight, rng.normal(size=tuple(weight.shape)))
    perm = rng.permutation(n)
    out = encoder(t(H), t(G_norm)).detach().numpy()
    permuted = encoder(t(H[perm]), t(G_norm[np.ix_(perm, perm)])).detach().numpy()
    np.testing.assert_allclose(permuted, out[perm], atol=1e-12)


def test_layer_count_changes_the_output(rng):
    n = 6
    G_norm = t(sym_normalize(rng.uniform(size=(n, n)) + np.eye(n)))
    H = t(rng.uniform(size=(n, n)))
    outputs = []
    for layers in (1, 2):
        encoder = AdglEncoder(n, 4, 4, layers=layers)
        for weight in encoder.weights:
            _set(weight, rng.normal(size=tuple(weight.shape)))
        outputs.append(encoder(H, G_norm).detach().numpy())
    assert not np.allclose(outputs[0], outputs[1])


def test_mlp2_zero_weights_give_zero_output():
    encoder = EdglEncoder(3, 4, 3)
    assert not mlp2(t(np.ones((2, 3))), encoder).detach().numpy().any()


def test_mlp2_identity_keeps_nonnegative_input(rng):
    encoder = EdglEncoder(4, 4, 4)
    _set(encoder.w0, np.eye(4))
    _set(encoder.w1, np.eye(4))
    X0 = rng.uniform(size=(3, 4))
    np.testing.assert_allclose(mlp2(t(X0), encoder).detach().numpy(), X0)


def test_mlp2_matches_two_step_oracle(rng):
    encoder = EdglEncoder(4, 4, 4)
    w0, b0, w1, b1 = (rng.normal(size=s) for s in ((4, 4), (4,), (4, 4), (4,)))
    parameters = (encoder.w0, encoder.b0, encoder.w1, encoder.b1)
    for parameter, values in zip(parameters, (w0, b0, w1, b1)):
        _set(parameter, values)
    X0 = rng.normal(size=(4, 4))
    expected = np.maximum(np.maximum(X0 @ w0 + b0, 0.0) @ w1 + b1, 0.0)
    np.testing.assert_allclose(mlp2(t(X0), encoder).detach().numpy(), expected, atol=1e-12)


def test_even_filter_on_swap_matrix():
    X = t([[1.0, 2.0], [3.0, 4.0]])
    out = even_filter(X, t([[0.0, 1.0], [1.0, 0.0]]), FilterConfig(k=4, alpha=0.2))
    np.testing.assert_allclose(out.numpy(), 0.488 * X.numpy())


def test_odd_filter_on_swap_matrix():
    X = t([[1.0, 2.0], [3.0, 4.0]])
    P = t([[0.0, 1.0], [1.0, 0.0]])
    out = odd_filter(X, P, FilterConfig(k=4, alpha=0.2))
    np.testing.assert_allclose(out.numpy(), 0.36 * (P @ X).numpy())


def test_filters_respect_walk_parity(rng):
    n_d, n_t = 4, 5
    P = _bipartite(rng, n_d, n_t)
    X = np.zeros((n_d + n_t, 3))
    X[1] = rng.normal(size=3)
    config = FilterConfig(k=8)
    even = even_filter(t(X), P, config).numpy()
    odd = odd_filter(t(X), P, config).numpy()
    assert not even[n_d:].any()
    assert not odd[:n_d].any()


def _dense_filter(P: np.ndarray, X: np.ndarray, config: FilterConfig, parity: str) -> np.ndarray:
    offset = 0 if parity == "even" else 1
    out = np.zeros_like(X)
    for k, coefficient in enumerate(filter_coefficients(config, parity)):
        out += coefficient * np.linalg.matrix_power(P, 2 * k + offset) @ X
    return out


def test_even_filter_matches_dense_powers(rng):
    P = _bipartite(rng, 5, 7).numpy()
    X = rng.normal(size=(12, 3))
    config = FilterConfig(k=6, alpha=0.2)
    out = even_filter(t(X), t(P), config).numpy()
    assert np.max(np.abs(out - _dense_filter(P, X, config, "even"))) < 1e-10


@settings(max_examples=30, deadline=None)
@given(
    n_d=st.integers(1, 6),
    n_t=st.integers(1, 6),
    k=st.integers(2, 10),
    alpha=st.floats(0.05, 0.95),
    seed=st.integers(0, 1000),
)
def test_filters_match_dense_oracle(n_d, n_t, k, alpha, seed):
    rng = np.random.default_rng(seed)
    P = _bipartite(rng, n_d, n_t).numpy()
    X = rng.normal(size=(n_d + n_t, 2))
    config = FilterConfig(k=k, alpha=alpha)
    for parity, apply in (("even", even_filter), ("odd", odd_filter)):
        out = apply(t(X), t(P), config).numpy()
        np.testing.assert_allclose(out, _dense_filter(P, X, config, parity), atol=1e-10)


def test_even_and_odd_filters_sum_to_the_combined_filter(rng):
    P = _bipartite(rng, 3, 3).numpy()
    X = rng.normal(size=(6, 2))
    config = FilterConfig(k=6, alpha=0.3)
    combined = np.zeros_like(X)
    for k in range(config.k // 2 + 1):
        coefficient = config.alpha * (1 - config.alpha) ** k
        combined += coefficient * np.linalg.matrix_power(P, 2 * k) @ X
        if k < config.k // 2:
            combined += coefficient * np.linalg.matrix_power(P, 2 * k + 1) @ X
    total = even_filter(t(X), t(P), config) + odd_filter(t(X), t(P), config)
    np.testing.assert_allclose(total.numpy(), combined, atol=1e-12)


def test_even_filter_is_linear(rng):
    P = _bipartite(rng, 4, 4)
    X1, X2 = t(rng.normal(size=(8, 3))), t(rng.normal(size=(8, 3)))
    config = FilterConfig(k=10)
    left = even_filter(2.0 * X1 - 3.0 * X2, P, config)
    right = 2.0 * even_filter(X1, P, config) - 3.0 * even_filter(X2, P, config)
    np.testing.assert_allclose(left.numpy(), right.numpy(), atol=1e-12)


def test_default_truncation_keeps_nearly_all_mass():
    assert 1.0 - sum(filter_coefficients(FilterConfig())) < 1e-9


def test_filter_rejects_mismatched_propagation():
    with pytest.raises(ValueError):
        even_filter(t(np.ones((3, 2))), t(np.eye(4)), FilterConfig(k=2))


def _identity_attention(dim: int) -> SelfAttention:
    attention = SelfAttention(dim, dim)
    for parameter in (attention.wq, attention.wk, attention.wv):
        _set(parameter, np.eye(dim))
    return attention


def test_attention_over_one_row_returns_it():
    H = t([[0.3, -1.2, 2.0]])
    out = self_attention(H, _identity_attention(3))
    np.testing.assert_allclose(out.detach().numpy(), H.numpy())


def test_attention_over_identical_rows_averages_values():
    H = t([[1.0, 2.0], [1.0, 2.0]])
    out = self_attention(H, _identity_attention(2)).detach().numpy()
    np.testing.assert_allclose(out, [[1.0, 2.0], [1.0, 2.0]])


def test_attention_weights_sum_to_one(rng):
    H = np.hstack([rng.normal(size=(5, 3)), np.ones((5, 1))])
    attention = SelfAttention(4, 4)
    _set(attention.wq, rng.normal(size=(4, 4)))
    _set(attention.wk, rng.normal(size=(4, 4)))
    value_weight = np.zeros((4, 4))
    value_weight[3, :] = 1.0
    _set(attention.wv, value_weight)
    out = self_attention(t(H), attention).detach().numpy()
    np.testing.assert_allclose(out, np.ones((5, 4)))
