#include "dynsbm/synth_gen.hpp"

#include <stdexcept>
#include <utility>

namespace dynsbm {

ClassAssignment balanced_assignment(int node_count, int k) {
  if (k < 1 || k > node_count) {
    throw std::invalid_argument("need 1 <= k <= node_count");
  }
  std::vector<int> labels(node_count);
  for (int i = 0; i < node_count; ++i) {
    labels[i] = static_cast<int>(static_cast<long long>(i) * k / node_count);
  }
  return ClassAssignment(std::move(labels), k);
}

GeneratedData generate(const GeneratorSpec& spec) {
  const int n = spec.node_count;
  const int k = spec.k;
  const int d = k * k;
  if (n < 1) throw std::invalid_argument("node_count must be positive");
  if (k < 1 || k > n) throw std::invalid_argument("need 1 <= k <= node_count");
  if (spec.T < 0) throw std::invalid_argument("T must be nonnegative");
  if (spec.hp.dim() != d) {
    throw std::invalid_argument("hyperparameter dimension is not k^2");
  }
  if (!(spec.p_stay >= 0.0 && spec.p_stay <= 1.0)) {
    throw std::invalid_argument("p_stay must lie in [0, 1]");
  }

  CounterRng rng(spec.seed);
  const Eigen::MatrixXd root0 = psd_sqrt(spec.hp.gamma0);
  const Eigen::MatrixXd root = psd_sqrt(spec.hp.gamma);

  Eigen::VectorXd noise(d);
  for (int i = 0; i < d; ++i) noise(i) = rng.gaussian();
  Eigen::VectorXd psi = spec.hp.mu0 + root0 * noise;

  ClassAssignment current = balanced_assignment(n, k);

  GroundTruth truth;
  truth.psi.resize(spec.T, d);
  truth.theta.resize(spec.T, d);
  truth.memberships.reserve(spec.T);
  std::vector<Snapshot> snapshots;
  snapshots.reserve(spec.T);

  for (int t = 1; t <= spec.T; ++t) {
    for (int i = 0; i < d; ++i) noise(i) = rng.gaussian();
    psi += root * noise;

    if (spec.membership_mode == MembershipMode::markov && t >= 2) {
      std::vector<int> labels = current.labels();
      for (int i = 0; i < n; ++i) {
        if (rng.uniform() >= spec.p_stay) labels[i] = rng.uniform_int(k);
      }
      current = ClassAssignment(std::move(labels), k);
    }

    const Eigen::VectorXd theta = logistic(psi);
    truth.psi.row(t - 1) = psi.transpose();
    truth.theta.row(t - 1) = theta.transpose();
    truth.memberships.push_back(current);

    Adjacency adj = Adjacency::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const double p =
            theta(vec_index(current.label(i), current.label(j), k));
        adj(i, j) = rng.uniform() < p ? 1 : 0;
      }
    }
    snapshots.emplace_back(std::move(adj));
  }

  return GeneratedData{SnapshotSequence(n, std::move(snapshots)),
                       std::move(truth)};
}

}  // namespace dynsbm
