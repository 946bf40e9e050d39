#pragma once

#include <cstdint>

#include "dynsbm/net_data.hpp"

namespace dynsbm {

/// Block edge probabilities, every entry strictly inside (0, 1).
struct EdgeProbabilityMatrix {
  Eigen::MatrixXd theta;

  int k() const { return static_cast<int>(theta.rows()); }
};

/// Validates interiority and squareness.
EdgeProbabilityMatrix make_edge_probabilities(Eigen::MatrixXd theta);

/// Bernoulli block log-likelihood
///   sum_ab [ m_ab log(theta_ab) + (n_ab - m_ab) log(1 - theta_ab) ],
/// skipping blocks with n_ab == 0.
double log_likelihood(const BlockStats& stats,
                      const EdgeProbabilityMatrix& theta);

struct MleResult {
  EdgeProbabilityMatrix theta;
  /// True where n_ab == 0: those entries were filled with 0.5.
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> filled;
};

/// Block densities clamped into [epsilon, 1 - epsilon]; the density matrix
/// is the maximum-likelihood estimate of the block probabilities.
MleResult mle_theta(const BlockStats& stats, double epsilon = 1e-4);

struct SpectralConfig {
  int embedding_rank = 0;  // 0 = use the requested class count
  int kmeans_restarts = 10;
  int kmeans_max_iterations = 100;
  std::uint64_t seed = 0;
};

struct SpectralResult {
  ClassAssignment assignment;
  /// False if no k-means restart converged within the iteration budget;
  /// the assignment is then the best seen so far.
  bool converged;
};

/// Directed adjacency spectral embedding: rank-r truncated SVD, node i
/// embedded as [U_i sqrt(s) | V_i sqrt(s)], clustered with k-means
/// (best of `kmeans_restarts` by within-cluster sum of squares). Every one
/// of the k classes is nonempty in the result.
SpectralResult spectral_init(const Snapshot& snapshot, int k,
                             const SpectralConfig& config);

}  // namespace dynsbm
