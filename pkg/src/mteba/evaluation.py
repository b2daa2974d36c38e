"""Accuracy metrics, 3-fold cross-validation, Wilcoxon signed-rank test, boxplot summaries."""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.stats import norm, rankdata

from .adaptation import AnalogyEstimator, EstimationStrategy, check_strategy
from .dataset import Dataset, DatasetError, apply_normalizer, fit_normalizer
from .modeltree import TreeParams

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PredictionPair:
    id: str
    actual: float
    predicted: float

    def __post_init__(self):
        if not self.actual > 0:
            raise ValueError(f"actual effort must be positive, got {self.actual!r}")

    @property
    def residual(self) -> float:
        return abs(self.actual - self.predicted)


def mre(pair: PredictionPair) -> float:
    return abs(pair.actual - pair.predicted) / pair.actual


@dataclass(frozen=True)
class MetricsReport:
    mmre: float
    mdmre: float
    pred25: float
    residuals: tuple[float, ...]
    n: int
    pairs: tuple[PredictionPair, ...] = field(default=(), repr=False)


def _median(values: Sequence[float]) -> float:
    s = sorted(values)
    n = len(s)
    mid = n // 2
    return s[mid] if n % 2 else (s[mid - 1] + s[mid]) / 2


def summarize(pairs: Sequence[PredictionPair], level: float = 0.25) -> MetricsReport:
    if len(pairs) == 0:
        raise ValueError("no prediction pairs to summarize")
    mres = [mre(p) for p in pairs]
    hits = sum(1 for m in mres if m <= level)
    return MetricsReport(
        mmre=math.fsum(mres) / len(mres),
        mdmre=_median(mres),
        pred25=100.0 * hits / len(mres),
        residuals=tuple(p.residual for p in pairs),
        n=len(pairs),
        pairs=tuple(pairs),
    )


@dataclass(frozen=True)
class FoldPlan:
    seed: int
    folds: tuple[int, ...]
    ids: tuple[str, ...]
    n_folds: int = 3

    @property
    def assignment(self) -> dict[str, int]:
        return dict(zip(self.ids, self.folds))

    def test_indices(self, fold: int) -> list[int]:
        return [i for i, f in enumerate(self.folds) if f == fold]

    def train_indices(self, fold: int) -> list[int]:
        return [i for i, f in enumerate(self.folds) if f != fold]

    def sizes(self) -> list[int]:
        return [self.folds.count(f) for f in range(self.n_folds)]


def make_folds(d: Dataset, folds: int = 3, seed: int = 0) -> FoldPlan:
    """Seeded shuffle, then round-robin fold assignment."""
    if folds < 2:
        raise ValueError("at least 2 folds are required")
    if len(d) < folds:
        raise ValueError(f"dataset of {len(d)} projects is smaller than the fold count {folds}")
    perm = np.random.default_rng(seed).permutation(len(d))
    assignment = [0] * len(d)
    for pos, i in enumerate(perm):
        assignment[int(i)] = pos % folds
    return FoldPlan(seed, tuple(assignment), tuple(p.id for p in d.projects), folds)


def fold_split(d: Dataset, plan: FoldPlan, fold: int) -> tuple[Dataset, Dataset]:
    """Normalized (training, test) for one fold; min/max come from training only."""
    if not 0 <= fold < plan.n_folds:
        raise ValueError(f"fold index {fold} out of range 0..{plan.n_folds - 1}")
    train, test = d.subset(plan.train_indices(fold)), d.subset(plan.test_indices(fold))
    norm_ = fit_normalizer(train)
    return apply_normalizer(norm_, train), apply_normalizer(norm_, test)


def run_experiment(
    d: Dataset,
    strategy: EstimationStrategy,
    seed: int = 0,
    folds: int = 3,
    tree_params: TreeParams | None = None,
    epsilon: float = 1.0,
) -> MetricsReport:
    """Cross-validate one strategy; pairs from all folds are pooled, in dataset order."""
    if any(p.has_missing for p in d.projects):
        raise DatasetError("dataset contains missing values; call remove_missing first")
    check_strategy(strategy, d.schema)
    plan = make_folds(d, folds, seed)
    predicted: dict[int, float] = {}
    for f in range(folds):
        train, test = fold_split(d, plan, f)
        model = AnalogyEstimator(strategy, tree_params, epsilon).fit(train)
        for i, target in zip(plan.test_indices(f), test.projects):
            predicted[i] = model.predict(target)
    pairs = [PredictionPair(p.id, p.effort, predicted[i]) for i, p in enumerate(d.projects)]
    return summarize(pairs)


def median_report(reports: Sequence[MetricsReport]) -> MetricsReport:
    """Component-wise median of per-seed reports (residuals are not carried)."""
    return MetricsReport(
        mmre=_median([r.mmre for r in reports]),
        mdmre=_median([r.mdmre for r in reports]),
        pred25=_median([r.pred25 for r in reports]),
        residuals=(),
        n=reports[0].n,
    )


@dataclass(frozen=True)
class WilcoxonResult:
    z: float
    p: float
    n: int


def wilcoxon_signed_rank(a: Sequence[float], b: Sequence[float], min_n: int = 6) -> WilcoxonResult:
    """Paired signed-rank test on a - b with the tie-corrected normal approximation.

    Negative z means the values in ``a`` tend to be smaller.  Fewer than
    ``min_n`` non-zero differences report p = 1.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"paired samples differ in length: {a.size} vs {b.size}")
    d = a - b
    d = d[d != 0]
    n = d.size
    if n == 0:
        return WilcoxonResult(0.0, 1.0, 0)
    ranks = rankdata(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    _, counts = np.unique(np.abs(d), return_counts=True)
    tie = float(np.sum(counts.astype(float) ** 3 - counts)) / 48.0
    var = n * (n + 1) * (2 * n + 1) / 24.0 - tie
    z = (w_plus - n * (n + 1) / 4.0) / math.sqrt(var) if var > 0 else 0.0
    if n < min_n:
        warnings.warn(f"only {n} non-zero differences; reporting p = 1", RuntimeWarning, stacklevel=2)
        return WilcoxonResult(z, 1.0, n)
    p = min(1.0, 2.0 * float(norm.sf(abs(z))))
    return WilcoxonResult(z, p, n)


def significance_marker(p: float) -> str:
    if p < 0.01:
        return "a"
    if p < 0.05:
        return "b"
    return ""


@dataclass(frozen=True)
class BoxplotStats:
    min: float
    q1: float
    median: float
    q3: float
    max_whisker: float
    outliers: tuple[float, ...]


def boxplot_stats(residuals: Sequence[float]) -> BoxplotStats:
    """Tukey boxplot with median-of-halves quartiles (the median is excluded for odd n)."""
    s = sorted(float(v) for v in residuals)
    n = len(s)
    if n == 0:
        raise ValueError("no residuals")
    med = _median(s)
    if n == 1:
        q1 = q3 = med
    else:
        half = n // 2
        q1, q3 = _median(s[:half]), _median(s[n - half:])
    iqr = q3 - q1
    lo_fence, hi_fence = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    inside = [v for v in s if lo_fence <= v <= hi_fence]
    outliers = tuple(v for v in s if v < lo_fence or v > hi_fence)
    return BoxplotStats(min(inside), q1, med, q3, max(inside), outliers)
