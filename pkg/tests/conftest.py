"""Shared pytest fixtures."""

from __future__ import annotations

import dataclasses
import sys
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from src.app import create_app
from src.config import AdmmConfig, FilterConfig, RunConfig, TrainConfig, testing_config
from src.data_access.features_dao import write_affinity
from src.data_access.sampling import sample_negatives
from src.data_access.seed import make_low_rank_dataset, write_dataset
from src.models.affinity import run_multiview
from src.models.entities import Dataset, EntitySet
from src.models.graphs import assemble_global


def write_tsv(path: Path, rows: list[list[object]]) -> Path:
    """Write rows as a tab-separated file and return the path."""

    path.write_text("".join("\t".join(str(c) for c in row) + "\n" for row in rows), "utf-8")
    return path


@pytest.fixture()
def tsv():
    return write_tsv


@pytest.fixture()
def tiny_train() -> TrainConfig:
    """Narrow model and short training for unit-level fits."""

    return TrainConfig(
        epochs=15,
        learning_rate=1e-2,
        hidden_dim=12,
        embed_dim=6,
        edgl_hidden=12,
        filter=FilterConfig(k=6),
    )


@pytest.fixture()
def lab_config(tiny_train: TrainConfig) -> RunConfig:
    base = testing_config()
    return dataclasses.replace(
        base,
        train=tiny_train,
        evaluation=dataclasses.replace(base.evaluation, folds=3),
    )


@pytest.fixture(scope="session")
def synthetic():
    """Small low-rank dataset; affinities come from the multi-view run."""

    return make_low_rank_dataset(n_d=12, n_t=8, rank=2, seed=3)


@pytest.fixture(scope="session")
def affinities(synthetic):
    return (
        run_multiview(list(synthetic.drug_views), AdmmConfig(), "drug"),
        run_multiview(list(synthetic.target_views), AdmmConfig(), "target"),
    )


@pytest.fixture()
def dataset(synthetic, affinities) -> Dataset:
    drug_affinity, target_affinity = affinities
    interactions = sample_negatives(synthetic.interactions, drug_affinity, 1.0, seed=0)
    return Dataset(
        entities=synthetic.entities,
        interactions=interactions,
        drug_affinity=drug_affinity,
        target_affinity=target_affinity,
    )


@pytest.fixture()
def global_graph(dataset: Dataset):
    return assemble_global(
        dataset.drug_affinity, dataset.target_affinity, dataset.interactions.matrix
    )


@pytest.fixture()
def dataset_dir(tmp_path: Path, synthetic, affinities) -> Path:
    """Synthetic dataset on disk with affinities next to lab.cfg."""

    directory = tmp_path / "data"
    write_dataset(synthetic, directory)
    for affinity in affinities:
        write_affinity(affinity, synthetic.entities, directory / f"{affinity.kind}_affinity.tsv")
    return directory


@pytest.fixture()
def toy_entities() -> EntitySet:
    return EntitySet(drug_ids=("d1", "d2"), target_ids=("t1", "t2"))


@pytest.fixture()
def cli(lab_config: RunConfig):
    """Command group bound to the small test profile."""

    return create_app(lab_config)


@pytest.fixture()
def runner(monkeypatch: pytest.MonkeyPatch) -> CliRunner:
    monkeypatch.setenv("DTI_LAB_ENV", "testing")
    return CliRunner(mix_stderr=False)


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
