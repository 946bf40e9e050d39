#pragma once

#include <optional>
#include <vector>

#include "dynsbm/state_space.hpp"

namespace dynsbm {

struct SearchConfig {
  int max_sweeps = 50;
  double objective_tolerance = 1e-9;
  /// Clamp for the plug-in probabilities used to score candidate moves;
  /// fit_sequence keys this to Hyperparameters::epsilon.
  double plugin_epsilon = 1e-4;
  /// Test-only exhaustive enumeration instead of hill climbing;
  /// limited to 12 nodes.
  bool exhaustive = false;
};

/// Log of the posterior state density up to its constant:
/// the Gaussian prior quadratic around the predicted state plus the block
/// Bernoulli log-likelihood at h(psi). Blocks with n == 0 are excluded from
/// both terms (their prior coordinates are marginalized out).
double log_posterior(const Eigen::VectorXd& psi, const GaussianState& pred,
                     const BlockStats& stats);

struct FitResult {
  ClassAssignment assignment;
  GaussianState predicted;
  GaussianState posterior;
  double objective;
  int sweeps;
  int moves_accepted;
  bool budget_limited;
};

/// Joint class/state estimate for one snapshot: steepest-ascent hill
/// climbing over single-node relabels, scoring each candidate assignment by
/// the log-posterior at its filtered state. Ties break on the lowest
/// (node, class); moves that would empty a class are skipped.
FitResult fit_aposteriori(const Snapshot& snapshot, const GaussianState& pred,
                          const ClassAssignment& init,
                          const SearchConfig& config);

struct SequenceFitOptions {
  int k = 2;
  SearchConfig search;
  SpectralConfig spectral;
  /// Overrides the spectral initialization of the first step.
  std::optional<ClassAssignment> initial;
};

/// Online a posteriori pass: spectral initialization at the first step,
/// warm starts from the previous assignment afterwards, random-walk
/// prediction between steps. The result at step t depends only on
/// snapshots 1..t.
std::vector<FitResult> fit_sequence(const SnapshotSequence& seq,
                                    const Hyperparameters& hp,
                                    const SequenceFitOptions& options);

}  // namespace dynsbm
