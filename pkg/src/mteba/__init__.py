"""Analogy-based software effort estimation with model-tree adaptation."""

from .adaptation import (
    STRATEGIES,
    AnalogyEstimator,
    DifferenceRecord,
    DifferenceTable,
    EstimationStrategy,
    RtmContext,
    StrategyError,
    build_difference_table,
    build_rtm_context,
    delta_vector,
    estimate_eba,
    estimate_linear_size,
    estimate_mendes_rules,
    estimate_mt,
    estimate_rtm,
    estimate_similarity,
    estimate_weighted_mean,
)
from .dataset import (
    Column,
    Dataset,
    DatasetError,
    Normalizer,
    Project,
    Schema,
    apply_normalizer,
    fit_normalizer,
    load_dataset,
    load_schema,
    parse_dataset,
    remove_missing,
)
from .evaluation import (
    BoxplotStats,
    FoldPlan,
    MetricsReport,
    PredictionPair,
    WilcoxonResult,
    boxplot_stats,
    make_folds,
    mre,
    run_experiment,
    summarize,
    wilcoxon_signed_rank,
)
from .modeltree import (
    LinearModel,
    Leaf,
    ModelTree,
    Split,
    TrainingMatrix,
    TreeParams,
    build_tree,
    dump_tree,
    fit_leaf_model,
    predict,
    prune,
    sd_reduction,
)
from .neighbors import Neighbor, distance, feature_delta, nearest_neighbors, similarity

__version__ = "0.1.0"
