#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>

namespace dynsbm {

/// Raised when a linear-algebra step fails for numerical reasons
/// (singular innovation covariance, non-convergent factorization).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// log(1 + e^x) without overflow for large |x|.
double softplus(double x);

/// Clamp a probability into [epsilon, 1 - epsilon].
double clamp_unit(double p, double epsilon);

/// Quantile of the standard normal distribution, p in (0, 1).
double normal_quantile(double p);

/// (A + A^T) / 2.
Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& a);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Eigen::MatrixXd& a);

/// Symmetric PSD square root via eigendecomposition; negative eigenvalues
/// within tolerance are truncated to zero.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& a);

/// Checks symmetry within sym_tol and eigenvalues >= -eig_tol.
bool is_symmetric_psd(const Eigen::MatrixXd& a, double sym_tol = 1e-10,
                      double eig_tol = 1e-8);

/// Deterministic counter-based random stream: the n-th variate depends only
/// on (seed, n), so any consumer that draws in a documented order is
/// reproducible. gaussian() consumes two uniforms (Box-Muller, cosine branch).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  /// Uniform on [0, 1), consuming one counter position.
  double uniform();

  /// Standard normal, consuming two counter positions.
  double gaussian();

  /// Integer in {0, ..., bound-1}, consuming one counter position.
  int uniform_int(int bound);

  std::uint64_t position() const { return counter_; }

 private:
  std::uint64_t next_bits();

  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace dynsbm
