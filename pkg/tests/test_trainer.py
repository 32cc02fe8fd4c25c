"""Model assembly, initialization, gradients, training and checkpoints."""

from __future__ import annotations

import dataclasses
import itertools

import numpy as np
import pytest
import torch

from src.config import LOSS_KINDS, VARIANTS, FilterConfig, LossConfig, TrainConfig
from src.data_access.checkpoints_dao import load_checkpoint, read_manifest, save_checkpoint
from src.models.entities import AffinityMatrix, Fold
from src.models.graphs import assemble_global, mask_interactions, to_tensors
from src.models.losses import compute_loss
from src.models.trainer import (
    ModelDims,
    fit,
    forward,
    gradients,
    init_params,
    predict_scores,
    split_labels,
)


def _random_graph(rng: np.random.Generator, n_d: int = 4, n_t: int = 3):
    def affinity(n: int, kind: str) -> AffinityMatrix:
        values = rng.uniform(size=(n, n))
        return AffinityMatrix(values=(values + values.T) / 2, kind=kind)

    A_DT = (rng.uniform(size=(n_d, n_t)) > 0.5).astype(np.float64)
    A_DT[0, 0] = 1.0
    A_DT[n_d - 1, n_t - 1] = 0.0
    return assemble_global(affinity(n_d, "drug"), affinity(n_t, "target"), A_DT, threshold=0.6)


def _small_config(variant: str = "full", kind: str = "RLF") -> TrainConfig:
    return TrainConfig(
        hidden_dim=4,
        embed_dim=5,
        edgl_hidden=4,
        activation="tanh",
        variant=variant,
        filter=FilterConfig(k=4),
        loss=LossConfig(kind=kind),
    )


def _all_pairs(graph) -> np.ndarray:
    return np.array([(i, j) for i in range(graph.n_d) for j in range(graph.n_t)])


def test_equal_seeds_give_identical_parameters():
    dims = ModelDims(n_d=5, n_t=4, hidden_dim=8, embed_dim=3, edgl_hidden=8)
    first = init_params(dims, seed=9).state_dict()
    second = init_params(dims, seed=9).state_dict()
    assert first.keys() == second.keys()
    for name in first:
        assert torch.equal(first[name], second[name])
    third = init_params(dims, seed=10).state_dict()
    assert not torch.equal(first["decoder.wl"], third["decoder.wl"])


def test_xavier_variance_and_zero_biases():
    dims = ModelDims(n_d=256, n_t=256, hidden_dim=512, embed_dim=8, edgl_hidden=8)
    model = init_params(dims, seed=0)
    weight = model.adgl.weights[0].detach().numpy()
    assert weight.shape == (512, 512)
    expected = 2.0 / (512 + 512)
    assert abs(weight.var() - expected) < 0.1 * expected
    assert not model.edgl.b0.detach().numpy().any()
    assert not model.edgl.b1.detach().numpy().any()


@pytest.mark.parametrize("variant", VARIANTS)
def test_every_variant_scores_all_pairs(rng, variant):
    graph = _random_graph(rng)
    config = _small_config(variant)
    model = init_params(ModelDims.from_config(graph.n_d, graph.n_t, config), 0, config)
    H_star = predict_scores(graph, model)
    assert H_star.shape == (graph.n_d, graph.n_t)
    assert ((H_star > 0) & (H_star < 1)).all()


def test_full_fusion_weight_ignores_the_filter_branch(rng):
    graph = _random_graph(rng)
    config = dataclasses.replace(_small_config(), fusion_omega=1.0)
    model = init_params(ModelDims.from_config(graph.n_d, graph.n_t, config), 1, config)
    before = predict_scores(graph, model)
    with torch.no_grad():
        for parameter in model.edgl.parameters():
            parameter.add_(torch.ones_like(parameter))
    np.testing.assert_array_equal(predict_scores(graph, model), before)


def test_forward_rejects_variant_mismatch(rng):
    graph = _random_graph(rng)
    config = _small_config("full")
    model = init_params(ModelDims.from_config(graph.n_d, graph.n_t, config), 0, config)
    with pytest.raises(ValueError, match="variant"):
        forward(graph, model, _small_config("odd"))


def _finite_difference(graph, model, config, batch, step=1e-5):
    tensors = to_tensors(graph)
    estimates = {}
    with torch.no_grad():
        for name, parameter in model.named_parameters():
            estimate = torch.zeros_like(parameter)
            flat = parameter.view(-1)
            for index in range(flat.numel()):
                original = flat[index].item()
                flat[index] = original + step
                up = compute_loss(forward(tensors, model, config), *batch, config.loss)
                flat[index] = original - step
                down = compute_loss(forward(tensors, model, config), *batch, config.loss)
                flat[index] = original
                estimate.view(-1)[index] = (up - down) / (2 * step)
            estimates[name] = estimate
    return estimates


@pytest.mark.parametrize(("variant", "kind"), list(itertools.product(VARIANTS, LOSS_KINDS)))
def test_gradients_match_central_differences(rng, variant, kind):
    graph = _random_graph(rng)
    config = _small_config(variant, kind)
    model = init_params(ModelDims.from_config(graph.n_d, graph.n_t, config), 3, config)
    batch = split_labels(graph, _all_pairs(graph))
    exact = gradients(graph, model, batch, config)
    estimated = _finite_difference(graph, model, config, batch)
    assert exact.keys() == estimated.keys()
    for name in exact:
        np.testing.assert_allclose(
            exact[name].numpy(), estimated[name].numpy(), rtol=1e-4, atol=1e-9, err_msg=name
        )


def test_fit_with_zero_epochs_returns_initial_parameters(global_graph, dataset, tiny_train):
    config = dataclasses.replace(tiny_train, epochs=0)
    fold = Fold(
        train_pairs=np.array(dataset.interactions.labeled_pairs),
        test_pairs=np.empty((0, 2), dtype=np.int64),
        label="all",
    )
    model, log = fit(global_graph, fold, config)
    dims = ModelDims.from_config(global_graph.n_d, global_graph.n_t, config)
    initial = init_params(dims, config.seed, config)
    assert log.epochs_run == 0
    for name, tensor in initial.state_dict().items():
        assert torch.equal(model.state_dict()[name], tensor)


def test_fit_is_deterministic_per_seed(global_graph, dataset, tiny_train):
    fold = Fold(
        train_pairs=np.array(dataset.interactions.labeled_pairs),
        test_pairs=np.empty((0, 2), dtype=np.int64),
        label="all",
    )
    first_model, first = fit(global_graph, fold, tiny_train)
    second_model, second = fit(global_graph, fold, tiny_train)
    assert first.losses == second.losses
    assert len(first.losses) == tiny_train.epochs
    np.testing.assert_array_equal(
        predict_scores(global_graph, first_model), predict_scores(global_graph, second_model)
    )


def test_fit_refuses_visible_test_pairs(global_graph, dataset, tiny_train):
    positives = np.array(dataset.interactions.positives)
    fold = Fold(train_pairs=positives[1:], test_pairs=positives[:1], label="leaky")
    with pytest.raises(ValueError, match="visible"):
        fit(global_graph, fold, tiny_train)


def test_masked_fold_trains_without_test_pairs(dataset, tiny_train):
    labeled = np.array(dataset.interactions.labeled_pairs)
    fold = Fold(train_pairs=labeled[2:], test_pairs=labeled[:2], label="masked")
    masked = mask_interactions(dataset.interactions.matrix, fold.test_pairs)
    graph = assemble_global(dataset.drug_affinity, dataset.target_affinity, masked)
    positives, negatives = split_labels(graph, fold.train_pairs)
    assert len(positives) + len(negatives) == len(labeled) - 2
    _model, log = fit(graph, fold, tiny_train)
    assert log.epochs_run == tiny_train.epochs


def test_early_stop_when_loss_stalls(global_graph, dataset, tiny_train):
    config = dataclasses.replace(tiny_train, patience=1, min_delta=1e9)
    fold = Fold(
        train_pairs=np.array(dataset.interactions.labeled_pairs),
        test_pairs=np.empty((0, 2), dtype=np.int64),
        label="all",
    )
    _model, log = fit(global_graph, fold, config)
    assert log.stopped_early
    assert log.epochs_run == 2


@pytest.mark.slow
def test_default_training_decreases_loss(global_graph, dataset):
    fold = Fold(
        train_pairs=np.array(dataset.interactions.labeled_pairs),
        test_pairs=np.empty((0, 2), dtype=np.int64),
        label="all",
    )
    _model, log = fit(global_graph, fold, TrainConfig(epochs=5))
    assert all(later < earlier for earlier, later in zip(log.losses, log.losses[1:]))


def test_checkpoint_reload_reproduces_scores(tmp_path, global_graph, tiny_train):
    config = dataclasses.replace(tiny_train, variant="attention", seed=4)
    dims = ModelDims.from_config(global_graph.n_d, global_graph.n_t, config)
    model = init_params(dims, config.seed, config)
    save_checkpoint(model, config, tmp_path / "ckpt", extra={"drug_ids": ["a", "b"]})
    restored, restored_config, manifest = load_checkpoint(tmp_path / "ckpt")
    assert restored.variant == "attention"
    assert restored_config == config
    assert manifest["drug_ids"] == ["a", "b"]
    assert read_manifest(tmp_path / "ckpt")["seed"] == 4
    np.testing.assert_array_equal(
        predict_scores(global_graph, restored), predict_scores(global_graph, model)
    )
