#include "dynsbm/num.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numbers>

namespace dynsbm {

double softplus(double x) {
  // max(x, 0) + log1p(e^{-|x|}) is exact in both tails.
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double clamp_unit(double p, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    throw std::invalid_argument("clamp epsilon must lie in (0, 0.5)");
  }
  return std::min(std::max(p, epsilon), 1.0 - epsilon);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("normal quantile requires p in (0, 1)");
  }
  static const boost::math::normal_distribution<double> standard_normal;
  return boost::math::quantile(standard_normal, p);
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& a) {
  return 0.5 * (a + a.transpose());
}

double min_eigenvalue(const Eigen::MatrixXd& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a,
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(a));
  Eigen::VectorXd values = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * values.asDiagonal() *
         es.eigenvectors().transpose();
}

bool is_symmetric_psd(const Eigen::MatrixXd& a, double sym_tol,
                      double eig_tol) {
  if (a.rows() != a.cols()) return false;
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > sym_tol) return false;
  return min_eigenvalue(symmetrized(a)) >= -eig_tol;
}

std::uint64_t CounterRng::next_bits() {
  // splitmix64-style mixer over (seed, counter).
  std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ULL * (counter_++ + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double CounterRng::uniform() {
  return static_cast<double>(next_bits() >> 11) * 0x1.0p-53;
}

double CounterRng::gaussian() {
  // (bits >> 11) + 1 keeps u1 in (0, 1] so the log is finite.
  double u1 = (static_cast<double>(next_bits() >> 11) + 1.0) * 0x1.0p-53;
  double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

int CounterRng::uniform_int(int bound) {
  if (bound <= 0) throw std::invalid_argument("uniform_int bound must be > 0");
  int v = static_cast<int>(uniform() * bound);
  return std::min(v, bound - 1);
}

}  // namespace dynsbm
