"""Fair evaluation harness for sentence embeddings.

Builds size-controlled sentence encoders from word vectors, treats
normalization as a tunable hyperparameter, scores encoders with unsupervised
and supervised protocols (including multiple classifiers), and meta-analyzes
the resulting score tables.
"""

from .corpus import (
    CrossValidation,
    DatasetManifest,
    FixedSplit,
    LabeledDataset,
    Pair,
    PairDataset,
    Sentence,
    load_labeled_dataset,
    load_pair_dataset,
    load_sts_benchmark,
    tokenize,
)
from .wordvec import WordVectors, load_word_vectors
from .compose import (
    AverageEncoder,
    ConcatEncoder,
    Encoder,
    PoolConcatEncoder,
    PrecomputedEncoder,
    RandomProjectionEncoder,
    SifEncoder,
    SifModel,
    concat_encoders,
    load_precomputed,
)
from .normalize import NormStats, apply_znorm, fit_znorm, normalize_ucp
from .metrics import cosine, dispersion, mse, pearson, spearman
from .evaluators import (
    ClassifierSpec,
    EvalResult,
    SimilarityModel,
    UcpResult,
    build_pair_features,
    eval_learned_similarity,
    eval_ucp,
    run_similarity_cell,
    run_transfer_task,
    run_ucp_cell,
    train_logreg,
    train_mlp,
    train_similarity_regressor,
)
from .analysis import (
    ScoreTable,
    dispersion_report,
    load_score_table,
    normalization_delta,
    size_sweep,
    transfer_probing_correlation,
)

__version__ = "0.1.0"
