"""Checkpoint bundles: one TSV per parameter plus a JSON manifest."""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
import torch

from ..config import RunConfig, TrainConfig, apply_overrides, flatten
from ..errors import DataFormatError
from ..models.trainer import InteractionModel, ModelDims
from .tsv import atomic_write_text, read_table, to_float_matrix, write_frame

MANIFEST_NAME = "manifest.json"


def _parameter_file(name: str) -> str:
    return f"{name.replace('.', '_')}.tsv"


def save_checkpoint(
    model: InteractionModel,
    config: TrainConfig,
    directory: str | Path,
    extra: dict[str, Any] | None = None,
) -> Path:
    """Write every parameter matrix and a manifest recording config, dims and seed."""

    directory = Path(directory)
    parameters = {}
    for name, tensor in model.state_dict().items():
        values = tensor.detach().cpu().numpy()
        file_name = _parameter_file(name)
        write_frame(pd.DataFrame(np.atleast_2d(values)), directory / file_name, header=False)
        parameters[name] = {"file": file_name, "shape": list(values.shape)}

    manifest = {
        "config": {f"train.{key}": value for key, value in flatten(config).items()},
        "dims": model.dims.as_dict(),
        "parameters": parameters,
        "seed": config.seed,
        "variant": model.variant,
    }
    manifest.update(extra or {})
    path = directory / MANIFEST_NAME
    atomic_write_text(path, json.dumps(manifest, indent=2, sort_keys=True, default=list) + "\n")
    return path


def read_manifest(directory: str | Path) -> dict[str, Any]:
    path = Path(directory) / MANIFEST_NAME
    if not path.is_file():
        raise DataFormatError(f"missing file: {path}")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"unreadable manifest {path}: {exc}") from exc


def load_checkpoint(directory: str | Path) -> tuple[InteractionModel, TrainConfig, dict[str, Any]]:
    """Rebuild the model saved by ``save_checkpoint``; returns (model, config, manifest)."""

    directory = Path(directory)
    manifest = read_manifest(directory)
    try:
        run_config = apply_overrides(RunConfig(), manifest["config"])
        config = dataclasses.replace(run_config.train, seed=int(manifest["seed"]))
        dims = ModelDims(**manifest["dims"])
        entries = manifest["parameters"]
    except (KeyError, TypeError) as exc:
        raise DataFormatError(f"incomplete checkpoint manifest in {directory}: {exc}") from exc

    model = InteractionModel(dims, config)
    state = {}
    for name, tensor in model.state_dict().items():
        if name not in entries:
            raise DataFormatError(f"checkpoint has no parameter {name}")
        path = directory / entries[name]["file"]
        values = to_float_matrix(read_table(path), path).reshape(entries[name]["shape"])
        if tuple(values.shape) != tuple(tensor.shape):
            raise DataFormatError(
                f"parameter {name} has shape {values.shape}, expected {tuple(tensor.shape)}"
            )
        state[name] = torch.as_tensor(values, dtype=torch.float64)
    model.load_state_dict(state)
    return model, config, manifest
