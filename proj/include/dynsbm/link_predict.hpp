#pragma once

#include <vector>

#include "dynsbm/net_data.hpp"
#include "dynsbm/static_sbm.hpp"

namespace dynsbm {

/// Edge-level exponentially weighted moving average. After observing W^t
/// the scores hold the prediction for time t+1; entries stay in [0,1] by
/// convexity and the diagonal stays zero.
struct EwmaState {
  Eigen::MatrixXd scores;
  double lambda = 0.5;

  int node_count() const { return static_cast<int>(scores.rows()); }
};

/// Seeds the predictor with the first snapshot: the prediction for time 2
/// is W^1 itself.
EwmaState make_ewma(const Snapshot& first, double lambda);

/// scores <- lambda * scores + (1 - lambda) * W^t, diagonal forced to 0.
EwmaState ewma_step(const EwmaState& state, const Snapshot& snapshot);

/// Real-valued edge scores targeting one future snapshot. The diagonal is
/// zero and excluded from every evaluation.
struct PredictionScores {
  Eigen::MatrixXd scores;
  int target_time = 0;

  int node_count() const { return static_cast<int>(scores.rows()); }
};

struct CombinerConfig {
  /// Weight on the EKF block score, in [0,1].
  double eta = 0.5;
};

/// Block-level scores: score(i, j) = theta_hat(c_i, c_j) for i != j, so
/// nodes of the same class pair score identically.
PredictionScores ekf_edge_scores(const EdgeProbabilityMatrix& theta_hat,
                                 const ClassAssignment& classes,
                                 int target_time = 0);

/// eta * ekf + (1 - eta) * ewma elementwise; eta in {0,1} reproduces the
/// corresponding input exactly.
PredictionScores combine(const PredictionScores& ekf, const EwmaState& ewma,
                         const CombinerConfig& config);

struct RocPoint {
  double threshold;
  double fpr;
  double tpr;
};

struct RocResult {
  /// First point is (0,0) at a threshold above every score, last is (1,1);
  /// both coordinates are non-decreasing along the curve.
  std::vector<RocPoint> points;
  double auc;
  long long positives;
  long long negatives;
};

/// ROC over raw score/label samples. Predicted-positive means
/// score >= threshold, with one threshold per distinct score value, so tied
/// scores collapse into a single step and the trapezoidal AUC equals the
/// Mann-Whitney rank statistic with ties counted half.
RocResult roc_from_samples(const std::vector<double>& scores,
                           const std::vector<bool>& labels);

/// ROC of a score matrix against an actual snapshot over all off-diagonal
/// pairs. The snapshot must have at least one edge and one non-edge.
RocResult roc_curve(const PredictionScores& scores, const Snapshot& actual);

/// Per-step estimates feeding the predictor: entry t (0-based) holds the
/// posterior block probabilities and classes after observing snapshot t and
/// is used to score target t+1. classes may hold a single assignment
/// applied to every step.
struct PredictionInputs {
  std::vector<EdgeProbabilityMatrix> theta;
  std::vector<ClassAssignment> classes;
};

struct PredictionEvaluation {
  double auc_pooled;
  /// One entry per target 2..T; NaN where the target snapshot has no edge
  /// or no non-edge.
  std::vector<double> auc_per_step;
  RocResult roc_pooled;
};

/// Output of one online prediction pass. The pure-EKF and pure-EWMA
/// evaluations ride along for comparison against the combination.
struct SequencePrediction {
  std::vector<PredictionScores> combined;
  PredictionEvaluation combined_eval;
  PredictionEvaluation ekf_eval;
  PredictionEvaluation ewma_eval;
  double lambda;
  double eta;
};

/// For each t in 1..T-1, builds scores for t+1 from snapshots and estimates
/// up to t only and evaluates them against W^{t+1}; reports per-step and
/// pooled ROC/AUC.
SequencePrediction predict_sequence(const SnapshotSequence& seq,
                                    const PredictionInputs& inputs,
                                    double lambda, double eta);

/// {0, 0.1, ..., 1.0}.
std::vector<double> default_eta_grid();

struct TuneConfig {
  /// Empty means default_eta_grid().
  std::vector<double> eta_grid;
  /// Number of leading targets whose pooled AUC drives the choice. An
  /// absolute count, so extending the sequence never changes the
  /// validation set.
  int validation_steps = 5;
};

/// Grid search for the combination weight by pooled AUC over the first
/// validation_steps targets; ties keep the earliest grid entry.
double tune_eta(const SnapshotSequence& seq, const PredictionInputs& inputs,
                double lambda, const TuneConfig& config);

}  // namespace dynsbm
