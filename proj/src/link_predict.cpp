#include "dynsbm/link_predict.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace dynsbm {

namespace {

void check_weight(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
  }
}

}  // namespace

EwmaState make_ewma(const Snapshot& first, double lambda) {
  check_weight(lambda, "lambda");
  return EwmaState{first.adjacency().cast<double>(), lambda};
}

EwmaState ewma_step(const EwmaState& state, const Snapshot& snapshot) {
  if (snapshot.node_count() != state.node_count()) {
    throw std::invalid_argument("snapshot does not match the EWMA node set");
  }
  Eigen::MatrixXd scores =
      state.lambda * state.scores +
      (1.0 - state.lambda) * snapshot.adjacency().cast<double>();
  scores.diagonal().setZero();
  return EwmaState{std::move(scores), state.lambda};
}

PredictionScores ekf_edge_scores(const EdgeProbabilityMatrix& theta_hat,
                                 const ClassAssignment& classes,
                                 int target_time) {
  if (theta_hat.k() != classes.k()) {
    throw std::invalid_argument(
        "block probabilities and assignment disagree on k");
  }
  const int n = classes.node_count();
  Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      scores(i, j) = theta_hat.theta(classes.label(i), classes.label(j));
    }
  }
  return PredictionScores{std::move(scores), target_time};
}

PredictionScores combine(const PredictionScores& ekf, const EwmaState& ewma,
                         const CombinerConfig& config) {
  check_weight(config.eta, "eta");
  if (ekf.node_count() != ewma.node_count()) {
    throw std::invalid_argument("score matrices differ in node count");
  }
  if (config.eta == 1.0) return ekf;
  if (config.eta == 0.0) return PredictionScores{ewma.scores, ekf.target_time};
  Eigen::MatrixXd scores =
      config.eta * ekf.scores + (1.0 - config.eta) * ewma.scores;
  scores.diagonal().setZero();
  return PredictionScores{std::move(scores), ekf.target_time};
}

RocResult roc_from_samples(const std::vector<double>& scores,
                           const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("scores and labels differ in length");
  }
  long long positives = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) {
      throw std::invalid_argument("scores must be finite");
    }
    if (labels[i]) ++positives;
  }
  const long long negatives =
      static_cast<long long>(scores.size()) - positives;
  if (positives == 0 || negatives == 0) {
    throw std::invalid_argument(
        "ROC is undefined without both positive and negative samples");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  RocResult result;
  result.positives = positives;
  result.negatives = negatives;
  result.points.push_back(
      {std::numeric_limits<double>::infinity(), 0.0, 0.0});
  long long tp = 0;
  long long fp = 0;
  double auc = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double threshold = scores[order[i]];
    // one point per distinct score value: ties move together
    while (i < order.size() && scores[order[i]] == threshold) {
      if (labels[order[i]]) {
        ++tp;
      } else {
        ++fp;
      }
      ++i;
    }
    const double fpr = static_cast<double>(fp) / negatives;
    const double tpr = static_cast<double>(tp) / positives;
    const RocPoint& prev = result.points.back();
    auc += (fpr - prev.fpr) * (tpr + prev.tpr) / 2.0;
    result.points.push_back({threshold, fpr, tpr});
  }
  result.auc = auc;
  return result;
}

RocResult roc_curve(const PredictionScores& scores, const Snapshot& actual) {
  const int n = actual.node_count();
  if (scores.node_count() != n) {
    throw std::invalid_argument("scores do not match the snapshot node set");
  }
  std::vector<double> flat;
  std::vector<bool> labels;
  flat.reserve(static_cast<std::size_t>(n) * (n - 1));
  labels.reserve(flat.capacity());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      flat.push_back(scores.scores(i, j));
      labels.push_back(actual.has_edge(i, j));
    }
  }
  return roc_from_samples(flat, labels);
}

namespace {

// Raw per-target ingredients shared by predict_sequence and tune_eta.
struct TargetFrame {
  PredictionScores ekf;
  Eigen::MatrixXd ewma;
  int target_index;  // 0-based position in the sequence
};

std::vector<TargetFrame> build_frames(const SnapshotSequence& seq,
                                      const PredictionInputs& inputs,
                                      double lambda, int target_count) {
  const int T = seq.length();
  if (T < 2) {
    throw std::invalid_argument("prediction requires at least two snapshots");
  }
  const auto steps = static_cast<std::size_t>(T);
  if (inputs.theta.size() != steps && inputs.theta.size() != steps - 1) {
    throw std::invalid_argument(
        "need one block-probability estimate per observed step");
  }
  if (inputs.classes.size() != 1 &&
      inputs.classes.size() != inputs.theta.size()) {
    throw std::invalid_argument(
        "classes must hold one assignment, or one per estimate");
  }

  std::vector<TargetFrame> frames;
  frames.reserve(target_count);
  EwmaState ewma = make_ewma(seq.at(0), lambda);
  for (int target = 1; target <= target_count; ++target) {
    const ClassAssignment& cls =
        inputs.classes.size() == 1
            ? inputs.classes.front()
            : inputs.classes[static_cast<std::size_t>(target) - 1];
    frames.push_back(TargetFrame{
        ekf_edge_scores(inputs.theta[static_cast<std::size_t>(target) - 1],
                        cls, target + 1),
        ewma.scores, target});
    if (target < target_count) ewma = ewma_step(ewma, seq.at(target));
  }
  return frames;
}

void append_pair_samples(const Eigen::MatrixXd& scores,
                         const Snapshot& actual, std::vector<double>& flat,
                         std::vector<bool>& labels) {
  const int n = actual.node_count();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      flat.push_back(scores(i, j));
      labels.push_back(actual.has_edge(i, j));
    }
  }
}

double step_auc(const Eigen::MatrixXd& scores, const Snapshot& actual,
                int target_time) {
  const int n = actual.node_count();
  const int possible = n * (n - 1);
  if (actual.edge_count() == 0 || actual.edge_count() == possible) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return roc_curve(PredictionScores{scores, target_time}, actual).auc;
}

}  // namespace

SequencePrediction predict_sequence(const SnapshotSequence& seq,
                                    const PredictionInputs& inputs,
                                    double lambda, double eta) {
  check_weight(eta, "eta");
  const int T = seq.length();
  std::vector<TargetFrame> frames = build_frames(seq, inputs, lambda, T - 1);

  SequencePrediction out;
  out.lambda = lambda;
  out.eta = eta;
  std::vector<double> pooled_combined, pooled_ekf, pooled_ewma;
  std::vector<bool> pooled_labels;
  for (const TargetFrame& frame : frames) {
    const Snapshot& actual = seq.at(frame.target_index);
    Eigen::MatrixXd combined =
        eta * frame.ekf.scores + (1.0 - eta) * frame.ewma;
    combined.diagonal().setZero();

    out.combined_eval.auc_per_step.push_back(
        step_auc(combined, actual, frame.ekf.target_time));
    out.ekf_eval.auc_per_step.push_back(
        step_auc(frame.ekf.scores, actual, frame.ekf.target_time));
    out.ewma_eval.auc_per_step.push_back(
        step_auc(frame.ewma, actual, frame.ekf.target_time));

    append_pair_samples(combined, actual, pooled_combined, pooled_labels);
    std::vector<bool> scratch;
    append_pair_samples(frame.ekf.scores, actual, pooled_ekf, scratch);
    scratch.clear();
    append_pair_samples(frame.ewma, actual, pooled_ewma, scratch);

    out.combined.push_back(
        PredictionScores{std::move(combined), frame.ekf.target_time});
  }

  out.combined_eval.roc_pooled = roc_from_samples(pooled_combined,
                                                  pooled_labels);
  out.combined_eval.auc_pooled = out.combined_eval.roc_pooled.auc;
  out.ekf_eval.roc_pooled = roc_from_samples(pooled_ekf, pooled_labels);
  out.ekf_eval.auc_pooled = out.ekf_eval.roc_pooled.auc;
  out.ewma_eval.roc_pooled = roc_from_samples(pooled_ewma, pooled_labels);
  out.ewma_eval.auc_pooled = out.ewma_eval.roc_pooled.auc;
  return out;
}

std::vector<double> default_eta_grid() {
  std::vector<double> grid;
  grid.reserve(11);
  for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
  return grid;
}

double tune_eta(const SnapshotSequence& seq, const PredictionInputs& inputs,
                double lambda, const TuneConfig& config) {
  const std::vector<double> grid =
      config.eta_grid.empty() ? default_eta_grid() : config.eta_grid;
  for (double eta : grid) check_weight(eta, "eta grid entry");
  if (config.validation_steps < 1) {
    throw std::invalid_argument("validation_steps must be at least 1");
  }
  const int targets =
      std::min(config.validation_steps, seq.length() - 1);
  std::vector<TargetFrame> frames =
      build_frames(seq, inputs, lambda, targets);

  std::vector<double> ekf_flat, ewma_flat;
  std::vector<bool> labels;
  for (const TargetFrame& frame : frames) {
    const Snapshot& actual = seq.at(frame.target_index);
    append_pair_samples(frame.ekf.scores, actual, ekf_flat, labels);
    std::vector<bool> scratch;
    append_pair_samples(frame.ewma, actual, ewma_flat, scratch);
  }

  double best_eta = grid.front();
  double best_auc = -1.0;
  std::vector<double> combined(ekf_flat.size());
  for (double eta : grid) {
    for (std::size_t i = 0; i < combined.size(); ++i) {
      combined[i] = eta * ekf_flat[i] + (1.0 - eta) * ewma_flat[i];
    }
    const double auc = roc_from_samples(combined, labels).auc;
    if (auc > best_auc) {
      best_auc = auc;
      best_eta = eta;
    }
  }
  return best_eta;
}

}  // namespace dynsbm
