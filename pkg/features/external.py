"""
Import hook for externally computed per-swallow features (e.g. pretrained-model embeddings)
CSV layout: header row, key columns source_id,segment_index, then numeric feature columns.
"""

import logging
from pathlib import Path
from typing import List, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from errors import DuplicateKey, HeaderMismatch, MissingKey, NonNumericCell

logger = logging.getLogger(__name__)

KEY_COLUMNS = ("source_id", "segment_index")


def import_external_features(
    path: Union[str, Path],
    keys: Sequence[Tuple[str, int]],
) -> Tuple[np.ndarray, List[str]]:
    """
    Load an external feature CSV aligned to the given swallow order

    Args:
        path: CSV file
        keys: (source_id, segment_index) per swallow, in table order

    Returns:
        (matrix of shape [len(keys), n_columns], column names)
    """
    frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    missing = [col for col in KEY_COLUMNS if col not in frame.columns]
    if missing:
        raise HeaderMismatch(f"{path}: missing key columns {missing}")
    feature_columns = [col for col in frame.columns if col not in KEY_COLUMNS]
    if not feature_columns:
        raise HeaderMismatch(f"{path}: no feature columns besides the keys")

    try:
        indices = frame["segment_index"].astype(int)
    except ValueError as exc:
        raise NonNumericCell(f"{path}: segment_index must be an integer ({exc})") from exc
    index = pd.MultiIndex.from_arrays([frame["source_id"], indices], names=list(KEY_COLUMNS))
    if index.has_duplicates:
        dupes = index[index.duplicated()].tolist()
        raise DuplicateKey(f"{path}: duplicate keys {dupes[:5]}")

    values = np.empty((len(frame), len(feature_columns)), dtype=np.float64)
    for j, col in enumerate(feature_columns):
        converted = pd.to_numeric(frame[col], errors="coerce").to_numpy(dtype=np.float64)
        bad = ~np.isfinite(converted)
        if bad.any():
            row = int(np.flatnonzero(bad)[0])
            raise NonNumericCell(f"{path}: column {col!r} row {row + 2} holds {frame[col].iloc[row]!r}")
        values[:, j] = converted

    lookup = {key: row for row, key in enumerate(index)}
    order = []
    for source_id, segment_index in keys:
        row = lookup.get((str(source_id), int(segment_index)))
        if row is None:
            raise MissingKey(f"{path}: no row for ({source_id}, {segment_index})")
        order.append(row)
    logger.info(f"imported {len(feature_columns)} external features for {len(order)} swallows")
    return values[order], feature_columns
