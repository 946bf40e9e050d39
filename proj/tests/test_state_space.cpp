#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "dynsbm/state_space.hpp"
#include "dynsbm/synth_gen.hpp"
#include "oracles.hpp"

using namespace dynsbm;

namespace {

ObservationModel all_observed(Eigen::VectorXd y, Eigen::VectorXd sigma2) {
  ObservationModel obs;
  obs.mask.assign(y.size(), true);
  obs.y = std::move(y);
  obs.sigma2 = std::move(sigma2);
  return obs;
}

GaussianState predicted(Eigen::VectorXd mean, Eigen::MatrixXd cov,
                        int time = 1) {
  return make_state(std::move(mean), std::move(cov), StateKind::predicted,
                    time);
}

}  // namespace

TEST_CASE("logit and logistic are inverse maps") {
  CHECK(logit(0.5) == 0.0);
  CHECK(logit(0.7310585786300049) == doctest::Approx(1.0).epsilon(1e-12));
  for (double x : {-5.0, 0.0, 5.0}) {
    CHECK(logit(logistic_scalar(x)) == doctest::Approx(x).epsilon(1e-12));
  }
  CHECK_THROWS_AS(logit(0.0), std::domain_error);
  CHECK_THROWS_AS(logit(1.0), std::domain_error);
  CHECK_THROWS_AS(logit(-0.1), std::domain_error);
}

TEST_CASE("logistic values, saturation, and stability") {
  CHECK(logistic_scalar(0.0) == 0.5);
  CHECK(logistic_scalar(50.0) == 1.0);
  CHECK(logistic_scalar(35.0) < 1.0);
  CHECK(std::isfinite(logistic_scalar(-5000.0)));
  CHECK(logistic_scalar(-5000.0) >= 0.0);

  Eigen::VectorXd psi(2);
  psi << -1.0, 1.0;
  const Eigen::VectorXd h = logistic(psi);
  CHECK(h(0) == doctest::Approx(0.2689414213699951).epsilon(1e-14));
  CHECK(h(1) == doctest::Approx(0.7310585786300049).epsilon(1e-14));

  Eigen::VectorXd bad(1);
  bad << std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(logistic(bad), std::domain_error);
}

TEST_CASE("jacobian_h is the diagonal logistic derivative") {
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
  const Eigen::MatrixXd j = jacobian_h(zero);
  CHECK(j.isApprox(0.25 * Eigen::MatrixXd::Identity(3, 3), 1e-15));

  Eigen::VectorXd psi(3);
  psi << -2.0, 0.3, 4.0;
  const Eigen::MatrixXd jp = jacobian_h(psi);
  const Eigen::MatrixXd jm = jacobian_h(Eigen::VectorXd(-psi));
  for (int i = 0; i < 3; ++i) {
    // h' is even.
    CHECK(jp(i, i) == doctest::Approx(jm(i, i)).epsilon(1e-14));
    const double fd = oracle::central_difference(
        [](double x) { return logistic_scalar(x); }, psi(i), 1e-5);
    CHECK(std::abs(jp(i, i) - fd) < 1e-6);
    for (int k = 0; k < 3; ++k) {
      if (k != i) CHECK(jp(i, k) == 0.0);
    }
  }
}

TEST_CASE("vec layout is column-stacked") {
  CHECK(vec_index(0, 0, 2) == 0);
  CHECK(vec_index(1, 0, 2) == 1);
  CHECK(vec_index(0, 1, 2) == 2);
  CHECK(vec_index(1, 1, 2) == 3);

  Eigen::MatrixXd mat(2, 2);
  mat << 1.0, 3.0, 2.0, 4.0;
  const Eigen::VectorXd v = matrix_to_vec(mat);
  for (int i = 0; i < 4; ++i) CHECK(v(i) == i + 1.0);
  CHECK(vec_to_matrix(v, 2) == mat);
  CHECK_THROWS_AS(vec_to_matrix(v, 3), std::invalid_argument);
}

TEST_CASE("make_state enforces the covariance invariants") {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(2);
  CHECK_NOTHROW(make_state(mean, Eigen::MatrixXd::Identity(2, 2),
                           StateKind::posterior, 0));

  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.5, -0.5, 1.0;
  CHECK_THROWS_AS(make_state(mean, asym, StateKind::posterior, 0),
                  std::invalid_argument);

  Eigen::MatrixXd indef = Eigen::MatrixXd::Identity(2, 2);
  indef(1, 1) = -1.0;
  CHECK_THROWS_AS(make_state(mean, indef, StateKind::posterior, 0),
                  std::invalid_argument);

  Eigen::VectorXd nan_mean(2);
  nan_mean << 0.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(make_state(nan_mean, Eigen::MatrixXd::Identity(2, 2),
                             StateKind::posterior, 0),
                  std::invalid_argument);
}

TEST_CASE("hyperparameter construction and validation") {
  const Hyperparameters hp = isotropic_hyperparameters(2, -1.0, 1.0, 0.01);
  CHECK(hp.dim() == 4);
  CHECK(hp.mu0.isConstant(-1.0));
  CHECK(hp.gamma0.isApprox(Eigen::MatrixXd::Identity(4, 4)));
  CHECK(hp.gamma.isApprox(0.01 * Eigen::MatrixXd::Identity(4, 4)));

  CHECK_THROWS_AS(make_hyperparameters(Eigen::VectorXd::Zero(4),
                                       Eigen::MatrixXd::Identity(3, 3),
                                       Eigen::MatrixXd::Identity(4, 4)),
                  std::invalid_argument);
  Eigen::MatrixXd indef = Eigen::MatrixXd::Identity(4, 4);
  indef(0, 0) = -1.0;
  CHECK_THROWS_AS(make_hyperparameters(Eigen::VectorXd::Zero(4), indef,
                                       Eigen::MatrixXd::Identity(4, 4)),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_hyperparameters(Eigen::VectorXd::Zero(4),
                                       Eigen::MatrixXd::Identity(4, 4),
                                       Eigen::MatrixXd::Identity(4, 4), 0.7),
                  std::invalid_argument);
}

TEST_CASE("observation_from_stats applies the CLT variance formula") {
  // One class of 6 nodes gives a 30-pair diagonal block; overwrite the
  // plug-in to exercise the formula at given theta values.
  Eigen::MatrixXi m(1, 1);
  m << 15;
  BlockStats stats = stats_from_counts(m, {6});
  stats.n(0, 0) = 25;
  stats.y(0, 0) = 15.0 / 25.0;
  const auto half = make_edge_probabilities(Eigen::MatrixXd::Constant(1, 1, 0.5));
  const ObservationModel obs = observation_from_stats(stats, half);
  CHECK(obs.mask[0]);
  CHECK(obs.y(0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(obs.sigma2(0) == doctest::Approx(0.01).epsilon(1e-15));

  stats.n(0, 0) = 12;
  const auto fifth = make_edge_probabilities(Eigen::MatrixXd::Constant(1, 1, 0.2));
  CHECK(observation_from_stats(stats, fifth).sigma2(0) ==
        doctest::Approx(0.16 / 12.0).epsilon(1e-12));

  // Unobserved block: masked, no variance requirement.
  const BlockStats missing =
      stats_from_counts(Eigen::MatrixXi::Zero(1, 1), {1});
  const ObservationModel masked = observation_from_stats(missing, half);
  CHECK_FALSE(masked.mask[0]);
}

TEST_CASE("init_predicted and predict follow the random walk") {
  const Hyperparameters hp = isotropic_hyperparameters(1, 0.0, 1.0, 1.0);
  const GaussianState first = init_predicted(hp);
  CHECK(first.kind == StateKind::predicted);
  CHECK(first.time == 1);
  CHECK(first.mean(0) == 0.0);
  CHECK(first.covariance(0, 0) == 2.0);

  const Hyperparameters sure = isotropic_hyperparameters(1, 0.3, 0.0, 0.0);
  CHECK(init_predicted(sure).covariance(0, 0) == 0.0);

  const Hyperparameters hp2 = isotropic_hyperparameters(2, logit(0.3), 1.0, 0.0);
  CHECK(init_predicted(hp2).mean(0) ==
        doctest::Approx(-0.8472978603872034).epsilon(1e-14));

  const GaussianState post = make_state(Eigen::VectorXd::Constant(1, 0.7),
                                        Eigen::MatrixXd::Identity(1, 1),
                                        StateKind::posterior, 3);
  const Hyperparameters walk = isotropic_hyperparameters(1, 0.0, 1.0, 2.0);
  const GaussianState pred = predict(post, walk);
  CHECK(pred.kind == StateKind::predicted);
  CHECK(pred.time == 4);
  CHECK(pred.mean(0) == 0.7);
  CHECK(pred.covariance(0, 0) == 3.0);

  const Hyperparameters frozen = isotropic_hyperparameters(1, 0.0, 1.0, 0.0);
  CHECK(predict(post, frozen).covariance(0, 0) == 1.0);
  CHECK_THROWS_AS(predict(pred, walk), std::invalid_argument);
}

TEST_CASE("ekf_update scalar cases") {
  // Certain prior ignores the data.
  const GaussianState sure = predicted(Eigen::VectorXd::Zero(1),
                                       Eigen::MatrixXd::Zero(1, 1));
  const ObservationModel obs = all_observed(Eigen::VectorXd::Constant(1, 1.0),
                                            Eigen::VectorXd::Constant(1, 1.0));
  const EkfUpdateResult certain = ekf_update(sure, obs, identity_link());
  CHECK(certain.state.mean(0) == 0.0);
  CHECK(certain.state.covariance(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(certain.diagnostics.gain(0, 0) == doctest::Approx(0.0));

  // Classic scalar update: R = sigma2 = 1, y = 1 halves the uncertainty.
  const GaussianState unit = predicted(Eigen::VectorXd::Zero(1),
                                       Eigen::MatrixXd::Identity(1, 1));
  const EkfUpdateResult half = ekf_update(unit, obs, identity_link());
  CHECK(half.state.mean(0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(half.state.covariance(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(half.state.kind == StateKind::posterior);
  CHECK(half.state.time == unit.time);
  CHECK(half.diagnostics.innovation(0) == doctest::Approx(1.0));

  // Fully masked observation returns the prediction as posterior.
  ObservationModel none = obs;
  none.mask[0] = false;
  const EkfUpdateResult skipped = ekf_update(unit, none);
  CHECK(skipped.state.mean == unit.mean);
  CHECK(skipped.state.covariance == unit.covariance);
  CHECK(skipped.state.kind == StateKind::posterior);
}

TEST_CASE("ekf_update matches the textbook linear filter") {
  std::mt19937 rng(314);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = trial % 2 == 0 ? 1 : 2;
    Eigen::VectorXd mean(d);
    for (int i = 0; i < d; ++i) mean(i) = noise(rng);
    Eigen::MatrixXd a(d, d);
    for (int i = 0; i < d * d; ++i) a(i / d, i % d) = noise(rng);
    Eigen::MatrixXd cov = a * a.transpose() +
                          0.1 * Eigen::MatrixXd::Identity(d, d);
    Eigen::VectorXd y(d), sigma2(d);
    for (int i = 0; i < d; ++i) {
      y(i) = noise(rng);
      sigma2(i) = 0.2 + std::abs(noise(rng));
    }

    const EkfUpdateResult ours =
        ekf_update(predicted(mean, cov), all_observed(y, sigma2),
                   identity_link());
    const oracle::KalmanState ref = oracle::kalman_update(
        {mean, cov}, Eigen::MatrixXd::Identity(d, d), y,
        Eigen::MatrixXd(sigma2.asDiagonal()));
    CHECK((ours.state.mean - ref.mean).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((ours.state.covariance - ref.cov).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("ekf_update masking leaves the observed block untouched") {
  // Block-diagonal prior over coordinates {0,1}: masking coordinate 1 must
  // reproduce the scalar update on coordinate 0 exactly.
  Eigen::VectorXd mean(2);
  mean << 0.2, -0.4;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(2, 2);
  cov(0, 0) = 0.8;
  cov(1, 1) = 1.3;
  Eigen::VectorXd y(2), sigma2(2);
  y << 0.6, 0.9;
  sigma2 << 0.5, 0.7;

  ObservationModel both = all_observed(y, sigma2);
  ObservationModel only_first = both;
  only_first.mask[1] = false;

  const EkfUpdateResult full =
      ekf_update(predicted(mean, cov), both, logistic_link());
  const EkfUpdateResult masked =
      ekf_update(predicted(mean, cov), only_first, logistic_link());
  CHECK(masked.state.mean(0) ==
        doctest::Approx(full.state.mean(0)).epsilon(1e-13));
  CHECK(masked.state.covariance(0, 0) ==
        doctest::Approx(full.state.covariance(0, 0)).epsilon(1e-13));
  // The masked coordinate keeps its prediction.
  CHECK(masked.state.mean(1) == mean(1));
  CHECK(masked.state.covariance(1, 1) == cov(1, 1));
  CHECK(masked.diagnostics.gain.row(1).isZero());
  CHECK(masked.diagnostics.gain.col(1).isZero());
  CHECK(masked.diagnostics.innovation(1) == 0.0);
}

TEST_CASE("ekf_update contracts the covariance") {
  std::mt19937 rng(77);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXd a(3, 3);
    for (int i = 0; i < 9; ++i) a(i / 3, i % 3) = noise(rng);
    Eigen::MatrixXd cov = a * a.transpose() +
                          0.05 * Eigen::MatrixXd::Identity(3, 3);
    Eigen::VectorXd mean(3), y(3), sigma2(3);
    for (int i = 0; i < 3; ++i) {
      mean(i) = noise(rng);
      y(i) = logistic_scalar(noise(rng));
      sigma2(i) = 0.1 + std::abs(noise(rng));
    }
    const GaussianState pred = predicted(mean, cov);
    const EkfUpdateResult result =
        ekf_update(pred, all_observed(y, sigma2));
    const Eigen::MatrixXd diff = pred.covariance - result.state.covariance;
    CHECK(min_eigenvalue(diff) > -1e-8);
    CHECK((result.state.covariance - result.state.covariance.transpose())
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }
}

TEST_CASE("ekf_update names coordinates of a singular innovation") {
  // Bypass make_state: an indefinite prior drives S negative, which no
  // jitter retry can rescue.
  GaussianState broken;
  broken.mean = Eigen::VectorXd::Zero(1);
  broken.covariance = Eigen::MatrixXd::Constant(1, 1, -2.0);
  broken.kind = StateKind::predicted;
  broken.time = 1;
  const ObservationModel obs = all_observed(
      Eigen::VectorXd::Constant(1, 0.5), Eigen::VectorXd::Constant(1, 1e-12));
  CHECK_THROWS_WITH_AS(ekf_update(broken, obs, identity_link()),
                       doctest::Contains("(0,0)"), NumericalError);
}

TEST_CASE("plugin_probabilities clamps the logistic mean") {
  Eigen::VectorXd mean(4);
  mean << 0.0, 40.0, -40.0, 1.0;
  const EdgeProbabilityMatrix plugin = plugin_probabilities(mean, 2, 1e-4);
  CHECK(plugin.theta(0, 0) == 0.5);
  CHECK(plugin.theta(1, 0) == 1.0 - 1e-4);
  CHECK(plugin.theta(0, 1) == 1e-4);
  CHECK(plugin.theta(1, 1) ==
        doctest::Approx(0.7310585786300049).epsilon(1e-14));
}

TEST_CASE("track_apriori runs the filter over a sequence") {
  GeneratorSpec spec;
  spec.node_count = 30;
  spec.k = 2;
  spec.T = 8;
  spec.hp = isotropic_hyperparameters(2, 0.0, 0.5, 0.01);
  spec.seed = 9;
  const GeneratedData data = generate(spec);
  const ClassAssignment classes = data.truth.memberships[0];

  const std::vector<TrackRecord> records =
      track_apriori(data.snapshots, {classes}, spec.hp, 0.95);
  REQUIRE(static_cast<int>(records.size()) == spec.T);
  for (int t = 0; t < spec.T; ++t) {
    const TrackRecord& rec = records[t];
    CHECK(rec.predicted.kind == StateKind::predicted);
    CHECK(rec.posterior.kind == StateKind::posterior);
    CHECK(rec.posterior.time == t + 1);
    CHECK(std::isfinite(rec.innovation_norm));
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        CHECK(rec.lower(a, b) > 0.0);
        CHECK(rec.lower(a, b) <= rec.theta(a, b));
        CHECK(rec.theta(a, b) <= rec.upper(a, b));
        CHECK(rec.upper(a, b) < 1.0);
      }
    }
  }

  // Wider level, wider interval.
  const std::vector<TrackRecord> wide =
      track_apriori(data.snapshots, {classes}, spec.hp, 0.99);
  CHECK(wide[3].upper(0, 0) - wide[3].lower(0, 0) >
        records[3].upper(0, 0) - records[3].lower(0, 0));

  // T = 0 gives an empty result.
  CHECK(track_apriori(SnapshotSequence(30, {}), {classes}, spec.hp).empty());

  CHECK_THROWS_AS(
      track_apriori(data.snapshots, {classes, classes}, spec.hp, 0.95),
      std::invalid_argument);
  CHECK_THROWS_AS(track_apriori(data.snapshots, {classes}, spec.hp, 1.0),
                  std::invalid_argument);
}
