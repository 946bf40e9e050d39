#include "dynsbm/aposteriori.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dynsbm {

double log_posterior(const Eigen::VectorXd& psi, const GaussianState& pred,
                     const BlockStats& stats) {
  if (pred.kind != StateKind::predicted) {
    throw std::invalid_argument("log_posterior expects a predicted state");
  }
  const int k = stats.k();
  const int d = k * k;
  if (psi.size() != d || pred.dim() != d) {
    throw std::invalid_argument("psi/state dimension is not k^2");
  }

  std::vector<int> observed;
  observed.reserve(d);
  for (int b = 0; b < k; ++b) {
    for (int a = 0; a < k; ++a) {
      if (stats.observed(a, b)) observed.push_back(vec_index(a, b, k));
    }
  }

  double quadratic = 0.0;
  if (!observed.empty()) {
    const int o = static_cast<int>(observed.size());
    Eigen::VectorXd diff(o);
    Eigen::MatrixXd r_oo(o, o);
    for (int p = 0; p < o; ++p) {
      diff(p) = psi(observed[p]) - pred.mean(observed[p]);
      for (int q = 0; q < o; ++q) {
        r_oo(p, q) = pred.covariance(observed[p], observed[q]);
      }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(r_oo);
    if (llt.info() != Eigen::Success) {
      throw NumericalError(
          "predicted covariance is singular on the observed coordinates");
    }
    quadratic = -0.5 * diff.dot(llt.solve(diff));
  }

  double likelihood = 0.0;
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      if (!stats.observed(a, b)) continue;
      const double x = psi(vec_index(a, b, k));
      // log h(x) = -softplus(-x), log(1 - h(x)) = -softplus(x).
      likelihood += -static_cast<double>(stats.m(a, b)) * softplus(-x) -
                    static_cast<double>(stats.n(a, b) - stats.m(a, b)) *
                        softplus(x);
    }
  }
  return quadratic + likelihood;
}

namespace {

struct ScoredAssignment {
  double objective;
  GaussianState posterior;
};

ScoredAssignment score_stats(const BlockStats& stats,
                             const GaussianState& pred,
                             const EdgeProbabilityMatrix& plugin) {
  EkfUpdateResult update =
      ekf_update(pred, observation_from_stats(stats, plugin));
  double objective = log_posterior(update.state.mean, pred, stats);
  return ScoredAssignment{objective, std::move(update.state)};
}

// Block counts, class sizes, and per-node class in/out degree tables kept
// consistent under single-node relabels.
class MoveState {
 public:
  MoveState(const Snapshot& snapshot, const ClassAssignment& init)
      : k_(init.k()),
        labels_(init.labels()),
        sizes_(init.class_sizes()),
        m_(Eigen::MatrixXi::Zero(init.k(), init.k())),
        out_degree_(snapshot.node_count(),
                    std::vector<int>(init.k(), 0)),
        in_degree_(snapshot.node_count(), std::vector<int>(init.k(), 0)) {
    const Adjacency& w = snapshot.adjacency();
    const int n = snapshot.node_count();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (w(i, j) == 0) continue;
        ++m_(labels_[i], labels_[j]);
        ++out_degree_[i][labels_[j]];
        ++in_degree_[j][labels_[i]];
      }
    }
  }

  int k() const { return k_; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<int>& sizes() const { return sizes_; }

  BlockStats current_stats() const { return stats_from_counts(m_, sizes_); }

  /// Stats after relabeling `node` to `to`, without mutating.
  BlockStats candidate_stats(int node, int to) const {
    const int from = labels_[node];
    Eigen::MatrixXi m = m_;
    for (int c = 0; c < k_; ++c) {
      m(from, c) -= out_degree_[node][c];
      m(to, c) += out_degree_[node][c];
      m(c, from) -= in_degree_[node][c];
      m(c, to) += in_degree_[node][c];
    }
    std::vector<int> sizes = sizes_;
    --sizes[from];
    ++sizes[to];
    return stats_from_counts(m, sizes);
  }

  void apply(const Snapshot& snapshot, int node, int to) {
    const int from = labels_[node];
    for (int c = 0; c < k_; ++c) {
      m_(from, c) -= out_degree_[node][c];
      m_(to, c) += out_degree_[node][c];
      m_(c, from) -= in_degree_[node][c];
      m_(c, to) += in_degree_[node][c];
    }
    --sizes_[from];
    ++sizes_[to];
    labels_[node] = to;
    const Adjacency& w = snapshot.adjacency();
    for (int v = 0; v < snapshot.node_count(); ++v) {
      if (w(v, node) != 0) {
        --out_degree_[v][from];
        ++out_degree_[v][to];
      }
      if (w(node, v) != 0) {
        --in_degree_[v][from];
        ++in_degree_[v][to];
      }
    }
  }

 private:
  int k_;
  std::vector<int> labels_;
  std::vector<int> sizes_;
  Eigen::MatrixXi m_;
  std::vector<std::vector<int>> out_degree_;
  std::vector<std::vector<int>> in_degree_;
};

FitResult exhaustive_fit(const Snapshot& snapshot, const GaussianState& pred,
                         const ClassAssignment& init,
                         const SearchConfig& config) {
  const int n = snapshot.node_count();
  const int k = init.k();
  if (n > 12) {
    throw std::invalid_argument(
        "exhaustive enumeration is limited to 12 nodes");
  }
  const EdgeProbabilityMatrix plugin =
      plugin_probabilities(pred.mean, k, config.plugin_epsilon);

  std::vector<int> labels(n, 0);
  std::optional<FitResult> best;
  while (true) {
    std::vector<int> sizes(k, 0);
    for (int c : labels) ++sizes[c];
    if (*std::min_element(sizes.begin(), sizes.end()) > 0) {
      ClassAssignment assignment(labels, k);
      ScoredAssignment scored =
          score_stats(block_counts(snapshot, assignment), pred, plugin);
      if (!best || scored.objective > best->objective) {
        best = FitResult{std::move(assignment), pred,
                         std::move(scored.posterior), scored.objective,
                         0,    0,
                         false};
      }
    }
    // odometer over k^n label vectors
    int pos = n - 1;
    while (pos >= 0 && labels[pos] == k - 1) labels[pos--] = 0;
    if (pos < 0) break;
    ++labels[pos];
  }
  if (!best) {
    throw std::invalid_argument(
        "no assignment keeps all classes nonempty (k exceeds nodes)");
  }
  return std::move(*best);
}

}  // namespace

FitResult fit_aposteriori(const Snapshot& snapshot, const GaussianState& pred,
                          const ClassAssignment& init,
                          const SearchConfig& config) {
  if (pred.kind != StateKind::predicted) {
    throw std::invalid_argument("fit_aposteriori expects a predicted state");
  }
  if (init.node_count() != snapshot.node_count()) {
    throw std::invalid_argument("assignment does not cover the snapshot");
  }
  const int k = init.k();
  if (pred.dim() != k * k) {
    throw std::invalid_argument("state dimension is not k^2");
  }
  {
    const std::vector<int> sizes = init.class_sizes();
    if (*std::min_element(sizes.begin(), sizes.end()) == 0) {
      throw std::invalid_argument(
          "initial assignment must keep all k classes nonempty");
    }
  }
  if (config.exhaustive) return exhaustive_fit(snapshot, pred, init, config);

  const int n = snapshot.node_count();
  const EdgeProbabilityMatrix plugin =
      plugin_probabilities(pred.mean, k, config.plugin_epsilon);

  MoveState state(snapshot, init);
  ScoredAssignment current = score_stats(state.current_stats(), pred, plugin);

  int sweeps = 0;
  int accepted = 0;
  bool accepted_on_last_sweep = false;
  while (sweeps < config.max_sweeps) {
    ++sweeps;
    accepted_on_last_sweep = false;
    int best_node = -1, best_class = -1;
    double best_objective = current.objective;
    GaussianState best_posterior = current.posterior;
    for (int node = 0; node < n; ++node) {
      const int from = state.labels()[node];
      if (state.sizes()[from] == 1) continue;  // move would empty a class
      for (int to = 0; to < k; ++to) {
        if (to == from) continue;
        ScoredAssignment cand =
            score_stats(state.candidate_stats(node, to), pred, plugin);
        if (cand.objective > best_objective) {
          best_objective = cand.objective;
          best_posterior = std::move(cand.posterior);
          best_node = node;
          best_class = to;
        }
      }
    }
    if (best_node < 0 ||
        best_objective <= current.objective + config.objective_tolerance) {
      break;
    }
    state.apply(snapshot, best_node, best_class);
    current = ScoredAssignment{best_objective, std::move(best_posterior)};
    ++accepted;
    accepted_on_last_sweep = true;
  }

  return FitResult{ClassAssignment(state.labels(), k),
                   pred,
                   std::move(current.posterior),
                   current.objective,
                   sweeps,
                   accepted,
                   sweeps == config.max_sweeps && accepted_on_last_sweep};
}

std::vector<FitResult> fit_sequence(const SnapshotSequence& seq,
                                    const Hyperparameters& hp,
                                    const SequenceFitOptions& options) {
  if (seq.length() < 1) {
    throw std::invalid_argument("fit_sequence requires at least one snapshot");
  }
  if (hp.dim() != options.k * options.k) {
    throw std::invalid_argument("hyperparameter dimension is not k^2");
  }
  ClassAssignment assignment =
      options.initial
          ? *options.initial
          : spectral_init(seq.at(0), options.k, options.spectral).assignment;

  SearchConfig search = options.search;
  search.plugin_epsilon = hp.epsilon;

  std::vector<FitResult> results;
  results.reserve(seq.length());
  GaussianState pred = init_predicted(hp);
  for (int t = 0; t < seq.length(); ++t) {
    FitResult result = fit_aposteriori(seq.at(t), pred, assignment, search);
    assignment = result.assignment;
    pred = predict(result.posterior, hp);
    results.push_back(std::move(result));
  }
  return results;
}

}  // namespace dynsbm
