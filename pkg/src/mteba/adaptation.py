"""Effort adaptation strategies for analogy-based estimation.

Seven strategies are available, by token:

``eba``     un-weighted mean of the K analogy efforts
``wmean``   mean weighted by normalized inverse-distance similarity
``l-eba``   linear size extrapolation, per analogy, then averaged
``mendes``  size-ratio adaptation rules
``s-eba``   similarity-weighted adjustment
``r-eba``   regression towards the mean productivity (closest analogy only)
``mt-eba``  model-tree adjustment learned from a leave-one-out difference table
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import NUMERIC, Dataset, Project, Schema
from .modeltree import ModelTree, TrainingMatrix, TreeParams
from .neighbors import Neighbor, distances, nearest_neighbors, rank_by_distance

log = logging.getLogger(__name__)

STRATEGIES = ("eba", "wmean", "l-eba", "mendes", "s-eba", "r-eba", "mt-eba")
SIZE_STRATEGIES = ("l-eba", "mendes", "r-eba")
MIN_TRAINING = {"r-eba": 3, "mt-eba": 2}


class StrategyError(ValueError):
    """The strategy cannot run on this schema or training set."""


def _mean(values: Sequence[float]) -> float:
    return float(np.mean(np.asarray(values, dtype=float)))


def estimate_eba(efforts: Sequence[float]) -> float:
    if len(efforts) == 0:
        raise ValueError("no analogies to aggregate")
    return _mean(efforts)


def estimate_weighted_mean(similarities: Sequence[float], efforts: Sequence[float]) -> float:
    s = np.asarray(similarities, dtype=float)
    e = np.asarray(efforts, dtype=float)
    if s.size == 0:
        raise ValueError("no analogies to aggregate")
    w = s / s.sum()
    return float(np.dot(w, e))


def estimate_similarity(similarities: Sequence[float], efforts: Sequence[float]) -> float:
    s = np.asarray(similarities, dtype=float)
    e = np.asarray(efforts, dtype=float)
    if s.size == 0:
        raise ValueError("no analogies to aggregate")
    total = s.sum()
    if total <= 0:
        raise ValueError("similarities must have a positive sum")
    return float(np.dot(s, e) / total)


def estimate_linear_size(analogy_effort: float, analogy_size: float, target_size: float) -> float:
    if analogy_size is None or analogy_size <= 0:
        raise ValueError(f"degenerate analogy size {analogy_size!r}")
    return analogy_effort / analogy_size * target_size


def estimate_mendes_rules(
    target_sizes: Sequence[float], analogy_sizes: Sequence[Sequence[float]], efforts: Sequence[float]
) -> float:
    """(1/K) sum_i [(1/M) sum_j f_jt / f_ji] * effort_i over K analogies and M size features."""
    ft = np.asarray(target_sizes, dtype=float).ravel()
    fa = np.atleast_2d(np.asarray(analogy_sizes, dtype=float))
    e = np.asarray(efforts, dtype=float)
    if ft.size == 0:
        raise ValueError("no size-like features given")
    if fa.shape != (e.size, ft.size):
        raise ValueError("analogy sizes must be a K x M table")
    if (fa <= 0).any():
        raise ValueError("size features of the analogies must be positive")
    ratios = (ft / fa).mean(axis=1)
    return float(np.mean(ratios * e))


@dataclass(frozen=True)
class RtmContext:
    mean_productivity: float
    correlation: float


def _pearson(a: np.ndarray, b: np.ndarray) -> float:
    a, b = a - a.mean(), b - b.mean()
    denom = np.sqrt(np.dot(a, a) * np.dot(b, b))
    if denom == 0 or not np.isfinite(denom):
        return 0.0
    return float(np.clip(np.dot(a, b) / denom, -1.0, 1.0))


def _require_sizes(training: Dataset):
    if training.schema.size_name is None:
        raise StrategyError("schema has no size column (mark one as size_numeric)")
    if (training.sizes <= 0).any() or np.isnan(training.sizes).any():
        raise StrategyError(f"size column {training.schema.size_name!r} must be positive")


def jackknife_analogies(training: Dataset) -> list[Neighbor]:
    """Closest analogy of every project among the remaining ones."""
    return [
        rank_by_distance(distances(p, training, training.schema), 1, exclude=i)[0]
        for i, p in enumerate(training.projects)
    ]


def build_rtm_context(training: Dataset) -> RtmContext:
    _require_sizes(training)
    if len(training) < 3:
        raise StrategyError("r-eba needs at least 3 training projects")
    productivity = training.efforts / training.sizes
    analogy = np.array([productivity[nb.index] for nb in jackknife_analogies(training)])
    return RtmContext(float(np.mean(productivity)), _pearson(analogy, productivity))


def estimate_rtm(analogy_effort: float, analogy_size: float, ctx: RtmContext) -> float:
    """FP_a * [PR_a + (M - PR_a)(1 - r)], rewritten as r*E_a + (1 - r)*FP_a*M.

    The rearranged form makes both limits exact: r = 1 returns E_a and
    r = 0 returns FP_a * M.
    """
    if analogy_size is None or analogy_size <= 0:
        raise ValueError(f"degenerate analogy size {analogy_size!r}")
    r = ctx.correlation
    return r * analogy_effort + (1.0 - r) * (analogy_size * ctx.mean_productivity)


@dataclass(frozen=True)
class DifferenceRecord:
    deltas: tuple[float, ...]
    effort_delta: float
    project_index: int
    analogy_index: int


@dataclass(frozen=True)
class DifferenceTable:
    records: tuple[DifferenceRecord, ...]
    names: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.records)

    def to_matrix(self) -> TrainingMatrix:
        X = np.array([r.deltas for r in self.records], dtype=float)
        y = np.array([r.effort_delta for r in self.records], dtype=float)
        return TrainingMatrix(X, y, self.names)


def delta_vector(p: Project, a: Project, schema: Schema) -> tuple[float, ...]:
    """Per-attribute p - a; categorical attributes become a 0/1 changed flag."""
    out = []
    for u, v, kind in zip(p.features, a.features, schema.feature_kinds):
        if kind == NUMERIC:
            out.append(float(u) - float(v))
        else:
            out.append(0.0 if u == v else 1.0)
    return tuple(out)


def build_difference_table(training: Dataset) -> DifferenceTable:
    if len(training) < 2:
        raise StrategyError("difference table needs at least 2 training projects")
    schema = training.schema
    records = []
    for i, nb in enumerate(jackknife_analogies(training)):
        p, a = training[i], training[nb.index]
        records.append(DifferenceRecord(delta_vector(p, a, schema), p.effort - a.effort, i, nb.index))
    return DifferenceTable(tuple(records), schema.predictor_names)


def estimate_mt(
    target: Project, training: Dataset, tree: ModelTree, k: int = 1, epsilon: float = 1.0
) -> float:
    """Closest-analogy effort plus the tree's predicted effort difference, averaged over K.

    Adapted efforts that come out non-positive are replaced by ``epsilon``.
    """
    neighbors = nearest_neighbors(target, training, training.schema, k)
    adapted = []
    for nb in neighbors:
        analogy = training[nb.index]
        value = analogy.effort + tree.predict(delta_vector(target, analogy, training.schema))
        if value <= 0:
            log.info("adapted effort %.6g for project %s floored at %g", value, target.id, epsilon)
            value = epsilon
        adapted.append(value)
    return _mean(adapted)


@dataclass(frozen=True)
class EstimationStrategy:
    name: str
    k: int = 1

    def __post_init__(self):
        if self.name not in STRATEGIES:
            raise StrategyError(f"unknown strategy {self.name!r}; choose from {', '.join(STRATEGIES)}")
        if self.k < 1:
            raise StrategyError("K must be at least 1")
        if self.name == "r-eba":
            object.__setattr__(self, "k", 1)

    @property
    def label(self) -> str:
        return f"{self.name} K={self.k}"


def check_strategy(strategy: EstimationStrategy, schema: Schema) -> None:
    if strategy.name in SIZE_STRATEGIES and schema.size_name is None:
        raise StrategyError(
            f"strategy {strategy.name} needs a size column, but the schema marks none as size_numeric"
        )


class AnalogyEstimator:
    """Fits one strategy on a (normalized) training fold and predicts targets."""

    def __init__(self, strategy: EstimationStrategy, tree_params: TreeParams | None = None,
                 epsilon: float = 1.0):
        self.strategy = strategy
        self.tree_params = tree_params or TreeParams()
        self.epsilon = epsilon
        self.training: Dataset | None = None
        self.rtm_: RtmContext | None = None
        self.table_: DifferenceTable | None = None
        self.tree_: ModelTree | None = None

    def fit(self, training: Dataset) -> "AnalogyEstimator":
        s = self.strategy
        check_strategy(s, training.schema)
        need = max(s.k, MIN_TRAINING.get(s.name, 1))
        if len(training) < need:
            raise StrategyError(
                f"training fold of {len(training)} projects is too small for {s.label} (needs {need})"
            )
        if s.name in SIZE_STRATEGIES:
            _require_sizes(training)
        if s.name == "r-eba":
            self.rtm_ = build_rtm_context(training)
        elif s.name == "mt-eba":
            self.table_ = build_difference_table(training)
            self.tree_ = ModelTree.fit(self.table_.to_matrix(), self.tree_params)
        self.training = training
        return self

    def predict(self, target: Project) -> float:
        if self.training is None:
            raise RuntimeError("estimator is not fitted")
        s, training = self.strategy, self.training
        if s.name == "mt-eba":
            return estimate_mt(target, training, self.tree_, s.k, self.epsilon)
        neighbors = nearest_neighbors(target, training, training.schema, s.k)
        efforts = [training[nb.index].effort for nb in neighbors]
        sims = [nb.similarity for nb in neighbors]
        if s.name == "eba":
            return estimate_eba(efforts)
        if s.name == "wmean":
            return estimate_weighted_mean(sims, efforts)
        if s.name == "s-eba":
            return estimate_similarity(sims, efforts)
        sizes = [training[nb.index].size for nb in neighbors]
        if s.name == "l-eba":
            return _mean([estimate_linear_size(e, f, target.size) for e, f in zip(efforts, sizes)])
        if s.name == "mendes":
            return estimate_mendes_rules([target.size], [[f] for f in sizes], efforts)
        return estimate_rtm(efforts[0], sizes[0], self.rtm_)
