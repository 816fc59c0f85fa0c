"""Embedding-based diversity scores.

Distances are cosine distances (1 - cosine similarity) over float64
arithmetic regardless of how the vectors were stored. Rows with zero
norm are a hard error; silently clamping them would hide upstream
export bugs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimMismatch, EmptyList, TooFewRows, ZeroNormRow


@dataclass(frozen=True)
class EmbeddingMatrix:
    """A keyed stack of row vectors for one response or item set."""

    key: str
    data: np.ndarray  # shape (rows, dims)

    @property
    def rows(self) -> int:
        return int(self.data.shape[0])

    @property
    def dims(self) -> int:
        return int(self.data.shape[1])

    def validate(self) -> None:
        if self.data.ndim != 2:
            raise DimMismatch(f"{self.key}: expected a 2-d array, got {self.data.ndim}-d")
        if self.data.shape[0] < 1 or self.data.shape[1] < 1:
            raise DimMismatch(f"{self.key}: degenerate shape {self.data.shape}")
        if not np.isfinite(self.data).all():
            raise ZeroNormRow(f"{self.key}: non-finite entries present")


def _checked_norms(data: np.ndarray, key: str) -> np.ndarray:
    norms = np.linalg.norm(data, axis=1)
    bad = np.nonzero(norms == 0.0)[0]
    if bad.size:
        raise ZeroNormRow(f"{key}: row {int(bad[0])} has zero norm")
    return norms


def dsi(m: EmbeddingMatrix) -> float:
    """Mean pairwise cosine distance over all unordered row pairs."""
    data = np.asarray(m.data, dtype=np.float64)
    n = data.shape[0]
    if n < 2:
        raise TooFewRows(f"{m.key}: dsi needs at least 2 rows, got {n}")
    if not np.isfinite(data).all():
        raise ZeroNormRow(f"{m.key}: non-finite entries present")
    norms = _checked_norms(data, m.key)
    gram = data @ data.T
    sims = gram / np.outer(norms, norms)
    iu = np.triu_indices(n, k=1)
    return float(np.mean(1.0 - sims[iu]))


def aut_distance(object_vec: np.ndarray, uses: EmbeddingMatrix) -> float:
    """Mean cosine distance from one object vector to each use vector."""
    obj = np.asarray(object_vec, dtype=np.float64).reshape(-1)
    data = np.asarray(uses.data, dtype=np.float64)
    if data.ndim != 2 or obj.shape[0] != data.shape[1]:
        raise DimMismatch(
            f"{uses.key}: object has {obj.shape[0]} dims, uses have {data.shape[1] if data.ndim == 2 else '?'}")
    if data.shape[0] < 1:
        raise TooFewRows(f"{uses.key}: needs at least one use vector")
    if not (np.isfinite(obj).all() and np.isfinite(data).all()):
        raise ZeroNormRow(f"{uses.key}: non-finite entries present")
    obj_norm = float(np.linalg.norm(obj))
    if obj_norm == 0.0:
        raise ZeroNormRow(f"{uses.key}: object vector has zero norm")
    norms = _checked_norms(data, uses.key)
    sims = (data @ obj) / (norms * obj_norm)
    return float(np.mean(1.0 - sims))


def unique_ratio(values: Sequence[str], normalize: bool = False) -> float:
    """Distinct-to-total ratio over a list of strings.

    With normalize=True values are lowercased and stripped before
    comparison.
    """
    if len(values) == 0:
        raise EmptyList("unique_ratio needs at least one value")
    if normalize:
        values = [v.strip().lower() for v in values]
    return len(set(values)) / len(values)
