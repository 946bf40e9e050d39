#include "dynsbm/state_space.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dynsbm {

double logit(double theta) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw std::domain_error("logit requires theta strictly inside (0, 1)");
  }
  return std::log(theta) - std::log1p(-theta);
}

double logistic_scalar(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Eigen::VectorXd logistic(const Eigen::VectorXd& psi) {
  Eigen::VectorXd out(psi.size());
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    if (!std::isfinite(psi(i))) {
      throw std::domain_error("logistic requires finite entries");
    }
    out(i) = logistic_scalar(psi(i));
  }
  return out;
}

Eigen::VectorXd logistic_derivative(const Eigen::VectorXd& psi) {
  Eigen::VectorXd out(psi.size());
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    const double h = logistic_scalar(psi(i));
    out(i) = h * (1.0 - h);
  }
  return out;
}

Eigen::MatrixXd jacobian_h(const Eigen::VectorXd& psi) {
  return logistic_derivative(psi).asDiagonal();
}

Eigen::MatrixXd vec_to_matrix(const Eigen::VectorXd& v, int k) {
  if (v.size() != static_cast<Eigen::Index>(k) * k) {
    throw std::invalid_argument("vector length is not k^2");
  }
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), k, k);
}

Eigen::VectorXd matrix_to_vec(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("matrix must be square");
  }
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

GaussianState make_state(Eigen::VectorXd mean, Eigen::MatrixXd covariance,
                         StateKind kind, int time) {
  if (covariance.rows() != mean.size() || covariance.cols() != mean.size()) {
    throw std::invalid_argument("covariance shape does not match mean");
  }
  if (!mean.allFinite()) {
    throw std::invalid_argument("state mean must be finite");
  }
  if (!is_symmetric_psd(covariance)) {
    throw std::invalid_argument(
        "covariance must be symmetric positive semidefinite");
  }
  return GaussianState{std::move(mean), std::move(covariance), kind, time};
}

Hyperparameters make_hyperparameters(Eigen::VectorXd mu0,
                                     Eigen::MatrixXd gamma0,
                                     Eigen::MatrixXd gamma, double epsilon) {
  const Eigen::Index d = mu0.size();
  if (gamma0.rows() != d || gamma0.cols() != d || gamma.rows() != d ||
      gamma.cols() != d) {
    throw std::invalid_argument("hyperparameter shapes do not match mu0");
  }
  if (!is_symmetric_psd(gamma0) || !is_symmetric_psd(gamma)) {
    throw std::invalid_argument(
        "gamma0 and gamma must be symmetric positive semidefinite");
  }
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    throw std::invalid_argument("clamp epsilon must lie in (0, 0.5)");
  }
  return Hyperparameters{std::move(mu0), std::move(gamma0), std::move(gamma),
                         epsilon};
}

Hyperparameters isotropic_hyperparameters(int k, double mu0_value,
                                          double gamma0_scale,
                                          double gamma_scale, double epsilon) {
  const int d = k * k;
  return make_hyperparameters(
      Eigen::VectorXd::Constant(d, mu0_value),
      gamma0_scale * Eigen::MatrixXd::Identity(d, d),
      gamma_scale * Eigen::MatrixXd::Identity(d, d), epsilon);
}

ObservationModel observation_from_stats(const BlockStats& stats,
                                        const EdgeProbabilityMatrix& plugin) {
  const int k = stats.k();
  if (plugin.k() != k) {
    throw std::invalid_argument("stats and plug-in theta share k");
  }
  const int d = k * k;
  ObservationModel obs;
  obs.y = Eigen::VectorXd::Zero(d);
  obs.sigma2 =
      Eigen::VectorXd::Constant(d, std::numeric_limits<double>::infinity());
  obs.mask.assign(d, false);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      if (!stats.observed(a, b)) continue;
      const int i = vec_index(a, b, k);
      const double p = plugin.theta(a, b);
      obs.y(i) = stats.y(a, b);
      obs.sigma2(i) = p * (1.0 - p) / stats.n(a, b);
      obs.mask[i] = true;
    }
  }
  return obs;
}

namespace {
double identity_value(double x) { return x; }
double identity_derivative(double) { return 1.0; }
double logistic_value(double x) { return logistic_scalar(x); }
double logistic_deriv(double x) {
  const double h = logistic_scalar(x);
  return h * (1.0 - h);
}
}  // namespace

Link logistic_link() { return Link{logistic_value, logistic_deriv}; }
Link identity_link() { return Link{identity_value, identity_derivative}; }

GaussianState init_predicted(const Hyperparameters& hp) {
  return make_state(hp.mu0, hp.gamma0 + hp.gamma, StateKind::predicted, 1);
}

GaussianState predict(const GaussianState& state, const Hyperparameters& hp) {
  if (state.kind != StateKind::posterior) {
    throw std::invalid_argument("predict expects a posterior state");
  }
  if (hp.dim() != state.dim()) {
    throw std::invalid_argument("hyperparameter dimension mismatch");
  }
  return make_state(state.mean, symmetrized(state.covariance + hp.gamma),
                    StateKind::predicted, state.time + 1);
}

namespace {

// Names the observed coordinates participating in the near-null direction
// of the innovation covariance.
[[noreturn]] void throw_singular_innovation(const Eigen::MatrixXd& s,
                                            const std::vector<int>& observed,
                                            int k) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  const Eigen::VectorXd v = es.eigenvectors().col(0);
  const double significant = 0.5 / std::sqrt(static_cast<double>(v.size()));
  std::ostringstream msg;
  msg << "innovation covariance is numerically singular on coordinates";
  for (Eigen::Index p = 0; p < v.size(); ++p) {
    if (std::abs(v(p)) > significant) {
      const int i = observed[p];
      msg << " (" << i % k << "," << i / k << ")";
    }
  }
  throw NumericalError(msg.str());
}

}  // namespace

EkfUpdateResult ekf_update(const GaussianState& pred,
                           const ObservationModel& obs, const Link& link) {
  if (pred.kind != StateKind::predicted) {
    throw std::invalid_argument("ekf_update expects a predicted state");
  }
  const int d = pred.dim();
  if (obs.dim() != d || static_cast<int>(obs.mask.size()) != d) {
    throw std::invalid_argument("observation dimension mismatch");
  }
  const int k = static_cast<int>(std::lround(std::sqrt(double(d))));

  std::vector<int> observed;
  observed.reserve(d);
  for (int i = 0; i < d; ++i) {
    if (obs.mask[i]) observed.push_back(i);
  }

  EkfDiagnostics diag{Eigen::MatrixXd::Zero(d, d), Eigen::VectorXd::Zero(d)};
  if (observed.empty()) {
    GaussianState post = pred;
    post.kind = StateKind::posterior;
    return EkfUpdateResult{std::move(post), std::move(diag)};
  }

  const int o = static_cast<int>(observed.size());
  Eigen::VectorXd j_o(o), innovation_o(o), sigma_o(o);
  Eigen::MatrixXd r_oo(o, o);
  for (int p = 0; p < o; ++p) {
    const int i = observed[p];
    j_o(p) = link.derivative(pred.mean(i));
    innovation_o(p) = obs.y(i) - link.value(pred.mean(i));
    sigma_o(p) = obs.sigma2(i);
    if (!(sigma_o(p) > 0.0) || !std::isfinite(sigma_o(p))) {
      throw std::invalid_argument(
          "observation variance must be positive and finite on observed "
          "coordinates");
    }
    for (int q = 0; q < o; ++q) {
      r_oo(p, q) = pred.covariance(observed[p], observed[q]);
    }
  }

  // Innovation covariance S = J R J^T + Sigma on the observed block.
  Eigen::MatrixXd s = j_o.asDiagonal() * r_oo * j_o.asDiagonal();
  s.diagonal() += sigma_o;
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) {
    Eigen::MatrixXd jittered =
        s + 1e-10 * Eigen::MatrixXd::Identity(o, o);
    llt.compute(jittered);
    if (llt.info() != Eigen::Success) {
      throw_singular_innovation(s, observed, k);
    }
  }

  // K = R J^T S^{-1} restricted to the observed block.
  Eigen::MatrixXd k_oo =
      llt.solve(j_o.asDiagonal() * r_oo).transpose();
  Eigen::VectorXd mean_post = pred.mean;
  for (int p = 0; p < o; ++p) {
    mean_post(observed[p]) += k_oo.row(p).dot(innovation_o);
  }

  // R_post = (I - K J) R_pred; K J touches only observed rows.
  Eigen::MatrixXd r_obs_rows(o, d);
  for (int p = 0; p < o; ++p) r_obs_rows.row(p) = pred.covariance.row(observed[p]);
  Eigen::MatrixXd correction = (k_oo * j_o.asDiagonal()) * r_obs_rows;
  Eigen::MatrixXd cov_post = pred.covariance;
  for (int p = 0; p < o; ++p) cov_post.row(observed[p]) -= correction.row(p);
  cov_post = symmetrized(cov_post);

  for (int p = 0; p < o; ++p) {
    diag.innovation(observed[p]) = innovation_o(p);
    for (int q = 0; q < o; ++q) diag.gain(observed[p], observed[q]) = k_oo(p, q);
  }

  return EkfUpdateResult{
      make_state(std::move(mean_post), std::move(cov_post),
                 StateKind::posterior, pred.time),
      std::move(diag)};
}

EdgeProbabilityMatrix plugin_probabilities(const Eigen::VectorXd& mean, int k,
                                           double epsilon) {
  Eigen::VectorXd theta = logistic(mean);
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    theta(i) = clamp_unit(theta(i), epsilon);
  }
  return make_edge_probabilities(vec_to_matrix(theta, k));
}

std::vector<TrackRecord> track_apriori(
    const SnapshotSequence& seq, const std::vector<ClassAssignment>& classes,
    const Hyperparameters& hp, double confidence_level) {
  const int t_count = seq.length();
  if (t_count == 0) return {};
  if (classes.size() != 1 && static_cast<int>(classes.size()) != t_count) {
    throw std::invalid_argument(
        "provide one class assignment per snapshot, or a single constant one");
  }
  if (!(confidence_level > 0.0 && confidence_level < 1.0)) {
    throw std::invalid_argument("confidence level must lie in (0, 1)");
  }
  const int k = classes.front().k();
  if (hp.dim() != k * k) {
    throw std::invalid_argument("hyperparameter dimension is not k^2");
  }
  const double z = normal_quantile(1.0 - (1.0 - confidence_level) / 2.0);

  std::vector<TrackRecord> records;
  records.reserve(t_count);
  GaussianState pred = init_predicted(hp);
  for (int t = 0; t < t_count; ++t) {
    const ClassAssignment& cls = classes.size() == 1 ? classes.front()
                                                     : classes[t];
    const BlockStats stats = block_counts(seq.at(t), cls);
    const ObservationModel obs =
        observation_from_stats(stats, plugin_probabilities(pred.mean, k,
                                                           hp.epsilon));
    EkfUpdateResult update = ekf_update(pred, obs);

    TrackRecord rec;
    rec.predicted = pred;
    rec.theta = vec_to_matrix(logistic(update.state.mean), k);
    const Eigen::VectorXd half_width =
        z * update.state.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
    rec.lower = vec_to_matrix(logistic(update.state.mean - half_width), k);
    rec.upper = vec_to_matrix(logistic(update.state.mean + half_width), k);
    rec.innovation_norm = update.diagnostics.innovation.norm();
    rec.posterior = std::move(update.state);

    pred = predict(rec.posterior, hp);
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace dynsbm
