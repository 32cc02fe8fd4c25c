"""Tab-separated file helpers shared by the data access modules."""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

import numpy as np
import pandas as pd

from ..errors import DataFormatError

FLOAT_FORMAT = "%.17g"


def read_table(path: str | Path) -> pd.DataFrame:
    """Read a UTF-8 TSV as strings, header row included as row 0.

    Cells are stripped so CRLF endings and trailing blanks are ignored. Short rows
    come back with NaN cells; callers decide whether that is an error.
    """

    file_path = Path(path)
    if not file_path.is_file():
        raise DataFormatError(f"missing file: {file_path}")
    try:
        frame = pd.read_csv(
            file_path,
            sep="\t",
            header=None,
            dtype=str,
            keep_default_na=False,
            na_filter=False,
            encoding="utf-8",
            skip_blank_lines=True,
        )
    except pd.errors.EmptyDataError as exc:
        raise DataFormatError(f"empty file: {file_path}") from exc
    except pd.errors.ParserError as exc:
        raise DataFormatError(f"row length mismatch in {file_path}: {exc}") from exc
    return frame.apply(lambda column: column.str.strip() if column.dtype == object else column)


def has_missing_cells(frame: pd.DataFrame) -> bool:
    return bool(frame.isna().to_numpy().any() or (frame == "").to_numpy().any())


def to_float_matrix(frame: pd.DataFrame, path: str | Path) -> np.ndarray:
    """Convert string cells to float64, rejecting non-numeric and non-finite cells."""

    try:
        values = frame.to_numpy(dtype=str).astype(np.float64)
    except ValueError as exc:
        raise DataFormatError(f"non-numeric feature value in {path}: {exc}") from exc
    if not np.isfinite(values).all():
        raise DataFormatError(f"non-finite feature value in {path}")
    return values


def _atomic_replace(path: Path, write) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    handle, temp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(handle, "wb") as stream:
            write(stream)
        os.replace(temp_name, path)
    except BaseException:
        Path(temp_name).unlink(missing_ok=True)
        raise


def atomic_write_text(path: str | Path, text: str) -> None:
    """Write ``text`` to a temp file beside ``path`` then rename it into place."""

    _atomic_replace(Path(path), lambda stream: stream.write(text.encode("utf-8")))


def atomic_write_bytes(path: str | Path, payload: bytes) -> None:
    _atomic_replace(Path(path), lambda stream: stream.write(payload))


def write_frame(
    frame: pd.DataFrame, path: str | Path, index: bool = False, header: bool = True
) -> None:
    """Atomically write a DataFrame as TSV with a fixed float format."""

    text = frame.to_csv(
        sep="\t",
        index=index,
        header=header,
        float_format=FLOAT_FORMAT,
        na_rep="nan",
        lineterminator="\n",
    )
    atomic_write_text(path, text)
