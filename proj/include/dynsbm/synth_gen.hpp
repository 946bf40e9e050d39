#pragma once

#include <cstdint>
#include <vector>

#include "dynsbm/net_data.hpp"
#include "dynsbm/state_space.hpp"

namespace dynsbm {

/// fixed: memberships never change ("static" in configuration files).
/// markov: each node keeps its class with probability p_stay per step and
/// otherwise resamples uniformly over all k classes.
enum class MembershipMode { fixed, markov };

struct GeneratorSpec {
  int node_count = 0;
  int k = 1;
  int T = 1;
  /// mu0/gamma0 give the initial state draw, gamma the per-step walk;
  /// epsilon is unused here.
  Hyperparameters hp;
  MembershipMode membership_mode = MembershipMode::fixed;
  double p_stay = 1.0;
  std::uint64_t seed = 0;
};

struct GroundTruth {
  Eigen::MatrixXd psi;    // T x k^2, row t-1 holds vectorized psi^t
  Eigen::MatrixXd theta;  // logistic of psi, same layout
  std::vector<ClassAssignment> memberships;  // one per step
};

struct GeneratedData {
  SnapshotSequence snapshots;
  GroundTruth truth;
};

/// Balanced contiguous labels c_i = floor(i * k / n); every class nonempty
/// for k <= n.
ClassAssignment balanced_assignment(int node_count, int k);

/// Draws psi^0 ~ N(mu0, gamma0), walks psi^t = psi^{t-1} + v^t with
/// v^t ~ N(0, gamma), and draws each off-diagonal edge independently as
/// Bernoulli(theta_{c_i c_j}^t). Deterministic given the seed; the stream
/// is consumed in a fixed order (psi^0 normals; per step: process noise,
/// membership draws for markov mode from the second step on, then edge
/// uniforms over (i, j) in lexicographic order).
GeneratedData generate(const GeneratorSpec& spec);

}  // namespace dynsbm
