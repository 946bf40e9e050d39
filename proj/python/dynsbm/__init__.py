"""Dynamic stochastic blockmodel toolkit.

Tracks time-varying block edge probabilities with an extended Kalman
filter, fits class memberships a posteriori, and scores link prediction.
"""

from ._core import (
    BlockStats,
    ClassAssignment,
    FitResult,
    GaussianState,
    GroundTruth,
    Hyperparameters,
    NumericalError,
    PredictionEvaluation,
    PredictionScores,
    RocResult,
    SequencePrediction,
    Snapshot,
    SnapshotSequence,
    TrackRecord,
    block_counts,
    fit_sequence,
    generate,
    isotropic_hyperparameters,
    label_agreement,
    load_classes,
    load_snapshots,
    log_likelihood,
    logistic,
    logistic_scalar,
    logit,
    make_hyperparameters,
    mle_theta,
    predict_sequence,
    rand_index,
    roc_curve,
    roc_from_samples,
    save_classes,
    save_snapshots,
    spectral_init,
    track_apriori,
    tune_eta,
)

__all__ = [
    "BlockStats",
    "ClassAssignment",
    "FitResult",
    "GaussianState",
    "GroundTruth",
    "Hyperparameters",
    "NumericalError",
    "PredictionEvaluation",
    "PredictionScores",
    "RocResult",
    "SequencePrediction",
    "Snapshot",
    "SnapshotSequence",
    "TrackRecord",
    "block_counts",
    "fit_sequence",
    "generate",
    "isotropic_hyperparameters",
    "label_agreement",
    "load_classes",
    "load_snapshots",
    "log_likelihood",
    "logistic",
    "logistic_scalar",
    "logit",
    "make_hyperparameters",
    "mle_theta",
    "predict_sequence",
    "rand_index",
    "roc_curve",
    "roc_from_samples",
    "save_classes",
    "save_snapshots",
    "spectral_init",
    "track_apriori",
    "tune_eta",
]
