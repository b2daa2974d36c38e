"""Mixed numeric/categorical Euclidean distance and exact K-nearest retrieval."""

from __future__ import annotations

import math
from dataclasses import dataclass
from numbers import Real
from typing import Sequence

import numpy as np

from .dataset import CATEGORICAL, NUMERIC, Dataset, DatasetError, Project, Schema


def feature_delta(a, b, kind: str) -> float:
    """Squared difference for numeric values, 0/1 mismatch for categorical ones."""
    if kind == NUMERIC:
        if not (isinstance(a, Real) and isinstance(b, Real)) or isinstance(a, bool) or isinstance(b, bool):
            raise TypeError(f"numeric delta needs two real numbers, got {a!r} and {b!r}")
        diff = float(a) - float(b)
        return diff * diff
    if kind == CATEGORICAL:
        if not (isinstance(a, str) and isinstance(b, str)):
            raise TypeError(f"categorical delta needs two tokens, got {a!r} and {b!r}")
        return 0.0 if a == b else 1.0
    raise ValueError(f"unknown feature kind {kind!r}")


def distance(p: Project, q: Project, schema: Schema) -> float:
    kinds = schema.feature_kinds
    if len(p.features) != len(kinds) or len(q.features) != len(kinds):
        raise DatasetError("project does not conform to the schema")
    total = 0.0
    for a, b, kind in zip(p.features, q.features, kinds):
        total += feature_delta(a, b, kind)
    return math.sqrt(total)


def similarity(dist: float) -> float:
    return 1.0 / (1.0 + dist)


@dataclass(frozen=True)
class Neighbor:
    index: int
    distance: float

    @property
    def similarity(self) -> float:
        return similarity(self.distance)


def distances(target: Project, pool: Dataset | Sequence[Project], schema: Schema) -> np.ndarray:
    """Distances from ``target`` to every pool member.

    Accumulates column by column in predictor order so the result is
    bit-identical to :func:`distance`.
    """
    if not isinstance(pool, Dataset):
        pool = Dataset(schema, tuple(pool))
    elif pool.schema != schema:
        raise DatasetError("pool schema does not match")
    kinds = schema.feature_kinds
    if len(target.features) != len(kinds):
        raise DatasetError("target does not conform to the schema")
    num, cat = pool.numeric_block, pool.categorical_block
    num_slot = {j: c for c, j in enumerate(schema.numeric_positions)}
    cat_slot = {j: c for c, j in enumerate(schema.categorical_positions)}
    total = np.zeros(len(pool), dtype=float)
    for j, kind in enumerate(kinds):
        v = target.features[j]
        if kind == NUMERIC:
            if isinstance(v, str) or v is None:
                raise TypeError(f"numeric feature {j} of target is {v!r}")
            diff = float(v) - num[:, num_slot[j]]
            total = total + diff * diff
        else:
            if not isinstance(v, str):
                raise TypeError(f"categorical feature {j} of target is {v!r}")
            total = total + (cat[:, cat_slot[j]] != v).astype(float)
    return np.sqrt(total)


def rank_by_distance(dist: np.ndarray, k: int, exclude: int | None = None) -> list[Neighbor]:
    """The ``k`` smallest entries, ties broken by lower index."""
    d = np.asarray(dist, dtype=float)
    order = np.argsort(d, kind="stable")
    if exclude is not None:
        order = order[order != exclude]
    return [Neighbor(int(i), float(d[i])) for i in order[:k]]


def nearest_neighbors(
    target: Project, pool: Dataset | Sequence[Project], schema: Schema, k: int
) -> list[Neighbor]:
    """Exhaustive K-nearest retrieval, sorted by distance then pool index."""
    size = len(pool)
    if size == 0:
        raise ValueError("empty pool")
    if k < 1:
        raise ValueError(f"K must be positive, got {k}")
    if k > size:
        raise ValueError(f"K={k} exceeds pool size {size}")
    return rank_by_distance(distances(target, pool, schema), k)
