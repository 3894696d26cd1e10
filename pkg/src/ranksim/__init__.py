"""Rank-based similarity metrics for dense word embeddings.

The package pairs a small set of similarity metrics (cosine, the
rank-overlap scores apsyn and apsynp, and Spearman correlation used as a
metric) with two evaluation harnesses: word-pair similarity benchmarks
scored by Spearman correlation against gold ratings, and the planted
outlier-detection task scored by outlier position percentage and
accuracy.

The numeric kernels ship in two interchangeable backends: a compiled
extension and a pure-NumPy fallback, selected at import (see
:mod:`ranksim.kernels`).
"""

from ranksim.embeddings import (
    EmbeddingMatrix,
    PhrasePolicy,
    Vocabulary,
    load_embeddings,
    lookup,
    mean_vector,
    resolve_phrase,
    save_embeddings,
)
from ranksim.errors import EvaluationError, FormatError, OOVError, RanksimError
from ranksim.metrics import (
    MatrixScorer,
    MetricSpec,
    RankProfile,
    apsyn,
    apsynp,
    cosine,
    rank_profile,
    similarity,
    spearman_metric,
)
from ranksim.outliers import (
    OutlierCase,
    OutlierReport,
    OutlierTopic,
    chi_square_accuracy,
    common_errors,
    compactness_pairwise,
    compactness_prototype,
    evaluate_outliers,
    expand_cases,
    outlier_position,
    parse_888,
)
from ranksim.simeval import (
    SimilarityReport,
    WordPairDataset,
    evaluate_similarity,
    fisher_r_to_z,
    parse_pair_dataset,
    spearman_correlation,
    tune_power,
)

__version__ = "0.1.0"

__all__ = [
    "EmbeddingMatrix",
    "PhrasePolicy",
    "Vocabulary",
    "load_embeddings",
    "lookup",
    "mean_vector",
    "resolve_phrase",
    "save_embeddings",
    "EvaluationError",
    "FormatError",
    "OOVError",
    "RanksimError",
    "MatrixScorer",
    "MetricSpec",
    "RankProfile",
    "apsyn",
    "apsynp",
    "cosine",
    "rank_profile",
    "similarity",
    "spearman_metric",
    "OutlierCase",
    "OutlierReport",
    "OutlierTopic",
    "chi_square_accuracy",
    "common_errors",
    "compactness_pairwise",
    "compactness_prototype",
    "evaluate_outliers",
    "expand_cases",
    "outlier_position",
    "parse_888",
    "SimilarityReport",
    "WordPairDataset",
    "evaluate_similarity",
    "fisher_r_to_z",
    "parse_pair_dataset",
    "spearman_correlation",
    "tune_power",
    "__version__",
]
