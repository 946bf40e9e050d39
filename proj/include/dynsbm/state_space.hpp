#pragma once

#include <vector>

#include "dynsbm/net_data.hpp"
#include "dynsbm/num.hpp"
#include "dynsbm/static_sbm.hpp"

namespace dynsbm {

/// log(theta / (1 - theta)) for theta strictly inside (0, 1).
double logit(double theta);

/// Numerically stable 1 / (1 + e^{-x}).
double logistic_scalar(double x);

/// Elementwise logistic map.
Eigen::VectorXd logistic(const Eigen::VectorXd& psi);

/// Diagonal of the logistic Jacobian: h(x)(1 - h(x)) per entry.
Eigen::VectorXd logistic_derivative(const Eigen::VectorXd& psi);

/// The Jacobian as a dense diagonal matrix.
Eigen::MatrixXd jacobian_h(const Eigen::VectorXd& psi);

/// Column-stacked vector index of block (a, b) for a k x k matrix.
inline int vec_index(int a, int b, int k) { return a + b * k; }

Eigen::MatrixXd vec_to_matrix(const Eigen::VectorXd& v, int k);
Eigen::VectorXd matrix_to_vec(const Eigen::MatrixXd& m);

enum class StateKind { predicted, posterior };

/// Gaussian belief over the vectorized logit block probabilities.
struct GaussianState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  StateKind kind = StateKind::predicted;
  int time = 0;

  int dim() const { return static_cast<int>(mean.size()); }
};

/// Validates finite mean, symmetry within 1e-10, eigenvalues >= -1e-8.
GaussianState make_state(Eigen::VectorXd mean, Eigen::MatrixXd covariance,
                         StateKind kind, int time);

/// Prior mean/covariance of the initial state, process-noise covariance of
/// the logit random walk, and the probability clamp used by plug-in
/// estimates.
struct Hyperparameters {
  Eigen::VectorXd mu0;
  Eigen::MatrixXd gamma0;
  Eigen::MatrixXd gamma;
  double epsilon = 1e-4;

  int dim() const { return static_cast<int>(mu0.size()); }
};

Hyperparameters make_hyperparameters(Eigen::VectorXd mu0,
                                     Eigen::MatrixXd gamma0,
                                     Eigen::MatrixXd gamma,
                                     double epsilon = 1e-4);

/// mu0 = mu0_value * ones, gamma0 = gamma0_scale * I, gamma = gamma_scale * I.
Hyperparameters isotropic_hyperparameters(int k, double mu0_value,
                                          double gamma0_scale,
                                          double gamma_scale,
                                          double epsilon = 1e-4);

/// Vectorized block densities with their CLT observation-noise variances
/// theta(1-theta)/n. Blocks with n == 0 are unobserved: mask false, y 0,
/// sigma2 infinity.
struct ObservationModel {
  Eigen::VectorXd y;
  Eigen::VectorXd sigma2;
  std::vector<bool> mask;

  int dim() const { return static_cast<int>(y.size()); }
};

/// Builds the observation from block statistics; the variance formula is
/// evaluated at the plug-in probabilities (the true ones are unknown at
/// update time).
ObservationModel observation_from_stats(const BlockStats& stats,
                                        const EdgeProbabilityMatrix& plugin);

/// Observation function applied elementwise to the state.
struct Link {
  double (*value)(double);
  double (*derivative)(double);
};

Link logistic_link();
Link identity_link();

/// Predicted state at the first step: mean mu0, covariance gamma0 + gamma.
GaussianState init_predicted(const Hyperparameters& hp);

/// Random-walk prediction: mean unchanged, covariance grows by gamma,
/// time advances.
GaussianState predict(const GaussianState& state, const Hyperparameters& hp);

struct EkfDiagnostics {
  /// Kalman gain; rows and columns of masked coordinates are zero.
  Eigen::MatrixXd gain;
  /// y - h(predicted mean); zero at masked coordinates.
  Eigen::VectorXd innovation;
};

struct EkfUpdateResult {
  GaussianState state;
  EkfDiagnostics diagnostics;
};

/// Extended Kalman filter measurement update. Masked coordinates are
/// infinite-variance observations and leave their state coordinates
/// untouched. The posterior covariance is re-symmetrized.
EkfUpdateResult ekf_update(const GaussianState& pred,
                           const ObservationModel& obs,
                           const Link& link = logistic_link());

struct TrackRecord {
  GaussianState predicted;
  GaussianState posterior;
  Eigen::MatrixXd theta;  // logistic of the posterior mean, k x k
  Eigen::MatrixXd lower;  // confidence bounds mapped through the logistic
  Eigen::MatrixXd upper;
  double innovation_norm;
};

/// Clamped logistic of a state mean as plug-in block probabilities.
EdgeProbabilityMatrix plugin_probabilities(const Eigen::VectorXd& mean, int k,
                                           double epsilon);

/// A priori filtering pass over the sequence: predict, observe block
/// densities under the given class assignments, update. `classes` holds one
/// assignment per snapshot, or a single assignment applied to all of them.
std::vector<TrackRecord> track_apriori(const SnapshotSequence& seq,
                                       const std::vector<ClassAssignment>& classes,
                                       const Hyperparameters& hp,
                                       double confidence_level = 0.95);

}  // namespace dynsbm
