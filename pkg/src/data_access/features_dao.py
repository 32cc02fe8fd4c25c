"""Data access helpers for feature views, entity lists and affinity matrices."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pandas as pd

from ..errors import DataFormatError
from ..models.entities import AffinityMatrix, EntitySet, FeatureView
from .tsv import has_missing_cells, read_table, to_float_matrix, write_frame


def _read_id_column(path: str | Path) -> tuple[str, ...]:
    frame = read_table(path)
    if frame.shape[1] != 1 or frame.shape[0] < 1 or frame.iat[0, 0] != "id":
        raise DataFormatError(f"{path} must be a single column with header 'id'")
    ids = tuple(frame.iloc[1:, 0].tolist())
    if any(not identifier for identifier in ids):
        raise DataFormatError(f"empty identifier in {path}")
    if len(set(ids)) != len(ids):
        raise DataFormatError(f"duplicate identifier in {path}")
    return ids


def parse_entity_set(drugs_path: str | Path, targets_path: str | Path) -> EntitySet:
    """Load the ordered drug and target identifier lists."""

    return EntitySet(drug_ids=_read_id_column(drugs_path), target_ids=_read_id_column(targets_path))


def write_entity_set(entities: EntitySet, drugs_path: str | Path, targets_path: str | Path) -> None:
    write_frame(pd.DataFrame({"id": list(entities.drug_ids)}), drugs_path)
    write_frame(pd.DataFrame({"id": list(entities.target_ids)}), targets_path)


def parse_feature_view(path: str | Path, entity_kind: str, entities: EntitySet) -> FeatureView:
    """Read one view; the header lists entity ids, each row is one feature.

    Columns are reordered to EntitySet order.
    """

    expected = entities.ids_for(entity_kind)
    frame = read_table(path)
    header = frame.iloc[0].tolist()
    if len(set(header)) != len(header):
        raise DataFormatError(f"duplicate header identifier in {path}")
    unknown = [identifier for identifier in header if identifier not in set(expected)]
    if unknown:
        raise DataFormatError(f"unknown identifier in {path}: {unknown[0]}")
    if len(header) != len(expected):
        raise DataFormatError(f"{path} lists {len(header)} of {len(expected)} {entity_kind}s")
    body = frame.iloc[1:]
    if body.empty:
        raise DataFormatError(f"{path} has no feature rows")
    if has_missing_cells(body):
        raise DataFormatError(f"row length does not match entity count in {path}")
    values = to_float_matrix(body, path)
    order = [header.index(identifier) for identifier in expected]
    return FeatureView(entity_kind=entity_kind, values=values[:, order], name=Path(path).stem)


def write_feature_view(view: FeatureView, entities: EntitySet, path: str | Path) -> None:
    frame = pd.DataFrame(view.values, columns=list(entities.ids_for(view.entity_kind)))
    write_frame(frame, path)


def write_affinity(affinity: AffinityMatrix, entities: EntitySet, path: str | Path) -> None:
    """Persist an affinity matrix with an identifier column and header."""

    ids = list(entities.ids_for(affinity.kind))
    frame = pd.DataFrame(affinity.values, index=pd.Index(ids, name="id"), columns=ids)
    write_frame(frame, path, index=True)


def parse_affinity(path: str | Path, entity_kind: str, entities: EntitySet) -> AffinityMatrix:
    """Read an affinity matrix written by ``write_affinity``, reordered to EntitySet order."""

    expected = entities.ids_for(entity_kind)
    frame = read_table(path)
    header = frame.iloc[0].tolist()
    if not header or header[0] != "id":
        raise DataFormatError(f"{path} must start with an 'id' column")
    columns = header[1:]
    rows = frame.iloc[1:, 0].tolist()
    if sorted(columns) != sorted(expected) or sorted(rows) != sorted(expected):
        raise DataFormatError(f"{path} identifiers do not match the {entity_kind} list")
    body = frame.iloc[1:, 1:]
    if has_missing_cells(body):
        raise DataFormatError(f"row length does not match entity count in {path}")
    values = to_float_matrix(body, path)
    row_order = [rows.index(identifier) for identifier in expected]
    col_order = [columns.index(identifier) for identifier in expected]
    values = values[np.ix_(row_order, col_order)]
    return AffinityMatrix(values=values, kind=entity_kind)
