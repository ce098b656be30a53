"""clusterlens: explain scatterplot selections with a glass-box additive model.

Select points in a 2D projection of a tabular dataset; the engine trains
a cyclic gradient-boosted additive model (piecewise-constant shape
function per feature over quantile bins) on the selected-vs-rest
labeling and reports which features separate the selection, by how much,
and with what shape.
"""

from .canonical import canonical_bytes, canonical_json, content_id
from .data import (
    DEFAULT_MAX_BINS,
    Dataset,
    FeatureColumn,
    FeatureStats,
    bin_index,
    load_csv,
    quantile_bin,
)
from .errors import (
    AlignmentError,
    ClusterLensError,
    DegenerateDataError,
    DegenerateLabelsError,
    DegenerateSelectionError,
    EmptyInputError,
    NoDataError,
    NotFoundError,
    ParseError,
    RangeError,
    SelectionOverlapError,
    ShapeError,
    StructuralError,
    ValidationError,
)
from .explain import (
    ClusterSelection,
    ExplanationReport,
    compare_selections,
    explain_selection,
    labels_from_selection,
    local_explanation,
)
from .model import (
    EbmModel,
    PairTermFunction,
    TermFunction,
    finalize_centering,
    model_from_json_dict,
    model_to_json_dict,
    pair_contribution,
    predict_proba,
    predict_score,
    predict_scores,
    sigmoid,
    term_contribution,
    term_importance,
)
from .projection import Projection2D, ingest_projection, pca_project
from .store import ArtifactStore
from .training import (
    TrainingConfig,
    boost_feature_once,
    cyclic_boost,
    detect_top_interactions,
    init_intercept,
    log_loss,
    make_bags,
    roc_auc,
    splitmix64,
    train_bagged,
)

__version__ = "0.1.0"

__all__ = [
    "AlignmentError",
    "ArtifactStore",
    "ClusterLensError",
    "ClusterSelection",
    "Dataset",
    "DegenerateDataError",
    "DegenerateLabelsError",
    "DegenerateSelectionError",
    "DEFAULT_MAX_BINS",
    "EbmModel",
    "EmptyInputError",
    "ExplanationReport",
    "FeatureColumn",
    "FeatureStats",
    "NoDataError",
    "NotFoundError",
    "PairTermFunction",
    "ParseError",
    "Projection2D",
    "RangeError",
    "SelectionOverlapError",
    "ShapeError",
    "StructuralError",
    "TermFunction",
    "TrainingConfig",
    "ValidationError",
    "bin_index",
    "boost_feature_once",
    "canonical_bytes",
    "canonical_json",
    "compare_selections",
    "content_id",
    "cyclic_boost",
    "detect_top_interactions",
    "explain_selection",
    "finalize_centering",
    "ingest_projection",
    "init_intercept",
    "labels_from_selection",
    "load_csv",
    "local_explanation",
    "log_loss",
    "make_bags",
    "model_from_json_dict",
    "model_to_json_dict",
    "pair_contribution",
    "pca_project",
    "predict_proba",
    "predict_score",
    "predict_scores",
    "quantile_bin",
    "roc_auc",
    "sigmoid",
    "splitmix64",
    "term_contribution",
    "term_importance",
    "train_bagged",
]
