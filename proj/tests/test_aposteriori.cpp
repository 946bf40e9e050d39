#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "doctest.h"
#include "dynsbm/aposteriori.hpp"
#include "dynsbm/metrics.hpp"
#include "dynsbm/synth_gen.hpp"
#include "oracles.hpp"

using namespace dynsbm;

namespace {

GaussianState flat_prior(int dim, double scale = 1.0, int time = 1) {
  return make_state(Eigen::VectorXd::Zero(dim),
                    scale * Eigen::MatrixXd::Identity(dim, dim),
                    StateKind::predicted, time);
}

// Planted two-block synthetic snapshot with equal-size classes.
GeneratedData planted_two_block(int n, double theta_in, double theta_out,
                                int T, std::uint64_t seed) {
  GeneratorSpec spec;
  spec.node_count = n;
  spec.k = 2;
  spec.T = T;
  Eigen::VectorXd mu0(4);
  Eigen::MatrixXd theta(2, 2);
  theta << theta_in, theta_out, theta_out, theta_in;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      mu0(vec_index(a, b, 2)) = logit(theta(a, b));
    }
  }
  spec.hp = make_hyperparameters(mu0, Eigen::MatrixXd::Zero(4, 4),
                                 Eigen::MatrixXd::Zero(4, 4));
  spec.seed = seed;
  return generate(spec);
}

// Same scoring the search applies to one candidate assignment.
double score_assignment(const Snapshot& snapshot, const GaussianState& pred,
                        const ClassAssignment& classes, double epsilon) {
  const BlockStats stats = block_counts(snapshot, classes);
  const EdgeProbabilityMatrix plugin =
      plugin_probabilities(pred.mean, classes.k(), epsilon);
  const EkfUpdateResult update =
      ekf_update(pred, observation_from_stats(stats, plugin));
  return log_posterior(update.state.mean, pred, stats);
}

}  // namespace

TEST_CASE("log_posterior closed-form scalar value") {
  Eigen::MatrixXi m(1, 1);
  m << 3;
  const BlockStats stats = stats_from_counts(m, {3});
  const GaussianState pred = flat_prior(1);
  const double value = log_posterior(Eigen::VectorXd::Zero(1), pred, stats);
  // Quadratic term vanishes at the prior mode; 3 log(1/2) + 3 log(1/2).
  CHECK(value == doctest::Approx(6.0 * std::log(0.5)).epsilon(1e-12));
  CHECK(value == doctest::Approx(-4.1588830833596715).epsilon(1e-12));

  // Away from the mode the quadratic kicks in: -0.5 * 0.4^2.
  const double shifted =
      log_posterior(Eigen::VectorXd::Constant(1, 0.4), pred, stats);
  const double bern = 3.0 * std::log(logistic_scalar(0.4)) +
                      3.0 * std::log(1.0 - logistic_scalar(0.4));
  CHECK(shifted == doctest::Approx(-0.5 * 0.16 + bern).epsilon(1e-12));
}

TEST_CASE("log_posterior approaches the likelihood as the prior flattens") {
  Eigen::MatrixXi m(2, 2);
  m << 5, 3, 2, 7;
  const BlockStats stats = stats_from_counts(m, {3, 4});
  const GaussianState pred = flat_prior(4, 1e8);

  Eigen::VectorXd u = Eigen::VectorXd::Constant(4, 0.3);
  Eigen::VectorXd v(4);
  v << -0.5, 0.2, 0.9, -1.1;
  const double posterior_gap =
      log_posterior(u, pred, stats) - log_posterior(v, pred, stats);
  const double likelihood_gap =
      log_likelihood(stats,
                     make_edge_probabilities(vec_to_matrix(logistic(u), 2))) -
      log_likelihood(stats,
                     make_edge_probabilities(vec_to_matrix(logistic(v), 2)));
  CHECK(posterior_gap == doctest::Approx(likelihood_gap).epsilon(1e-4));
}

TEST_CASE("log_posterior drops masked coordinates from both terms") {
  // Class sizes {3, 1}: the (1,1) block has no possible edges.
  Eigen::MatrixXi m = Eigen::MatrixXi::Zero(2, 2);
  m(0, 0) = 4;
  m(0, 1) = 2;
  m(1, 0) = 1;
  const BlockStats stats = stats_from_counts(m, {3, 1});
  REQUIRE_FALSE(stats.observed(1, 1));

  const GaussianState pred = flat_prior(4);
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(4);
  const double base = log_posterior(psi, pred, stats);
  // Moving the masked coordinate changes nothing.
  psi(vec_index(1, 1, 2)) = 5.0;
  CHECK(log_posterior(psi, pred, stats) == base);
}

TEST_CASE("log_posterior rejects a singular prior on observed coordinates") {
  Eigen::MatrixXi m(1, 1);
  m << 2;
  const BlockStats stats = stats_from_counts(m, {3});
  GaussianState degenerate;
  degenerate.mean = Eigen::VectorXd::Zero(1);
  degenerate.covariance = Eigen::MatrixXd::Zero(1, 1);
  degenerate.kind = StateKind::predicted;
  degenerate.time = 1;
  CHECK_THROWS_AS(log_posterior(Eigen::VectorXd::Zero(1), degenerate, stats),
                  NumericalError);
}

TEST_CASE("fit_aposteriori fixed points and degenerate cases") {
  const GeneratedData data = planted_two_block(12, 0.9, 0.05, 1, 21);
  const Snapshot& snap = data.snapshots.at(0);
  const ClassAssignment& truth = data.truth.memberships[0];
  const GaussianState pred = flat_prior(4, 2.0);
  SearchConfig config;

  // The planted labels are a local optimum of a strongly separated graph.
  const FitResult settled = fit_aposteriori(snap, pred, truth, config);
  CHECK(settled.moves_accepted == 0);
  CHECK(settled.assignment == truth);
  CHECK(settled.budget_limited == false);
  CHECK(settled.objective ==
        doctest::Approx(score_assignment(snap, pred, truth, 1e-4))
            .epsilon(1e-12));
  CHECK(settled.posterior.kind == StateKind::posterior);

  // k = 1: no moves exist; the EKF posterior still comes back.
  const ClassAssignment single(std::vector<int>(12, 0), 1);
  const FitResult lone =
      fit_aposteriori(snap, flat_prior(1), single, config);
  CHECK(lone.assignment == single);
  CHECK(lone.moves_accepted == 0);

  // Two singleton classes: every move would empty a class, all skipped.
  Adjacency tiny = Adjacency::Zero(2, 2);
  tiny(0, 1) = 1;
  const ClassAssignment pinned({0, 1}, 2);
  const FitResult stuck =
      fit_aposteriori(Snapshot(tiny), flat_prior(4), pinned, config);
  CHECK(stuck.assignment == pinned);
  CHECK(stuck.moves_accepted == 0);

  // Empty init class is rejected up front.
  CHECK_THROWS_AS(fit_aposteriori(snap, pred,
                                  ClassAssignment(std::vector<int>(12, 0), 2),
                                  config),
                  std::invalid_argument);
}

TEST_CASE("fit_aposteriori repairs a planted flip") {
  for (std::uint64_t seed : {3u, 8u, 15u}) {
    const GeneratedData data = planted_two_block(8, 0.9, 0.05, 1, seed);
    const Snapshot& snap = data.snapshots.at(0);
    const ClassAssignment& truth = data.truth.memberships[0];
    const ClassAssignment flipped = truth.with_label(2, 1 - truth.label(2));
    const GaussianState pred = flat_prior(4, 2.0);
    SearchConfig config;

    const FitResult result = fit_aposteriori(snap, pred, flipped, config);
    CHECK(result.moves_accepted >= 1);

    // Local optimality: no single relabel scores above the result.
    for (int node = 0; node < 8; ++node) {
      for (int cls = 0; cls < 2; ++cls) {
        if (cls == result.assignment.label(node)) continue;
        const ClassAssignment neighbor =
            result.assignment.with_label(node, cls);
        bool empties = false;
        for (int size : neighbor.class_sizes()) {
          if (size == 0) empties = true;
        }
        if (empties) continue;
        CHECK(score_assignment(snap, pred, neighbor, config.plugin_epsilon) <=
              result.objective + 1e-9);
      }
    }
  }
}

TEST_CASE("fit_aposteriori objective never exceeds the exhaustive maximum") {
  for (std::uint64_t seed : {1u, 2u}) {
    const GeneratedData data = planted_two_block(8, 0.9, 0.05, 1, seed);
    const Snapshot& snap = data.snapshots.at(0);
    const GaussianState pred = flat_prior(4, 2.0);
    SearchConfig config;

    const ClassAssignment init =
        data.truth.memberships[0].with_label(0, 1 - data.truth.memberships[0].label(0));
    const FitResult climbed = fit_aposteriori(snap, pred, init, config);

    SearchConfig full = config;
    full.exhaustive = true;
    const FitResult best = fit_aposteriori(snap, pred, init, full);

    // Independent enumeration over every all-classes-nonempty labeling.
    double expected = -std::numeric_limits<double>::infinity();
    oracle::for_each_assignment(8, 2, true,
                                [&](const std::vector<int>& labels) {
                                  const double s = score_assignment(
                                      snap, pred, ClassAssignment(labels, 2),
                                      config.plugin_epsilon);
                                  if (s > expected) expected = s;
                                });
    CHECK(best.objective == doctest::Approx(expected).epsilon(1e-12));
    CHECK(climbed.objective <= best.objective + 1e-9);
  }
}

TEST_CASE("fit_aposteriori label permutation equivariance") {
  const GeneratedData data = planted_two_block(10, 0.8, 0.1, 1, 5);
  const Snapshot& snap = data.snapshots.at(0);
  const GaussianState pred = flat_prior(4, 2.0);
  SearchConfig config;

  const ClassAssignment init = data.truth.memberships[0];
  std::vector<int> swapped_labels;
  for (int label : init.labels()) swapped_labels.push_back(1 - label);
  const ClassAssignment swapped(swapped_labels, 2);

  const FitResult a = fit_aposteriori(snap, pred, init, config);
  const FitResult b = fit_aposteriori(snap, pred, swapped, config);
  CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-9));
  CHECK(rand_index(a.assignment, b.assignment) == 1.0);
}

TEST_CASE("fit_aposteriori reports budget exhaustion") {
  const GeneratedData data = planted_two_block(10, 0.9, 0.05, 1, 12);
  const Snapshot& snap = data.snapshots.at(0);
  ClassAssignment init = data.truth.memberships[0];
  // Two flips need two accepted moves; one sweep accepts one.
  init = init.with_label(0, 1 - init.label(0));
  init = init.with_label(5, 1 - init.label(5));
  SearchConfig tight;
  tight.max_sweeps = 1;
  const FitResult result =
      fit_aposteriori(snap, flat_prior(4, 2.0), init, tight);
  CHECK(result.sweeps == 1);
  CHECK(result.moves_accepted == 1);
  CHECK(result.budget_limited);
}

TEST_CASE("fit_sequence recovers static memberships and stays online") {
  const GeneratedData data = planted_two_block(40, 0.7, 0.1, 4, 33);

  SequenceFitOptions options;
  options.k = 2;
  options.spectral.seed = 2;
  const Hyperparameters hp = isotropic_hyperparameters(2, 0.0, 1.0, 0.01);
  const std::vector<FitResult> fits = fit_sequence(data.snapshots, hp, options);
  REQUIRE(static_cast<int>(fits.size()) == 4);
  for (const FitResult& fit : fits) {
    CHECK(rand_index(fit.assignment, data.truth.memberships[0]) >= 0.95);
    CHECK(std::isfinite(fit.objective));
  }

  // Online contract: a prefix reproduces the leading results bit for bit.
  const std::vector<FitResult> head =
      fit_sequence(data.snapshots.prefix(2), hp, options);
  REQUIRE(head.size() == 2);
  for (int t = 0; t < 2; ++t) {
    CHECK(head[t].assignment == fits[t].assignment);
    CHECK(head[t].objective == fits[t].objective);
    CHECK(head[t].posterior.mean == fits[t].posterior.mean);
    CHECK(head[t].posterior.covariance == fits[t].posterior.covariance);
  }

  // T = 1 is exactly spectral_init followed by one fit.
  const std::vector<FitResult> first =
      fit_sequence(data.snapshots.prefix(1), hp, options);
  const SpectralResult spectral =
      spectral_init(data.snapshots.at(0), 2, options.spectral);
  const FitResult direct = fit_aposteriori(
      data.snapshots.at(0), init_predicted(hp), spectral.assignment,
      [&] {
        SearchConfig c = options.search;
        c.plugin_epsilon = hp.epsilon;
        return c;
      }());
  CHECK(first[0].assignment == direct.assignment);
  CHECK(first[0].objective == direct.objective);

  CHECK_THROWS_AS(fit_sequence(SnapshotSequence(40, {}), hp, options),
                  std::invalid_argument);
}

TEST_CASE("fit results satisfy the stored-objective invariant") {
  const GeneratedData data = planted_two_block(14, 0.8, 0.1, 2, 44);
  SequenceFitOptions options;
  options.k = 2;
  const Hyperparameters hp = isotropic_hyperparameters(2, 0.0, 1.0, 0.05);
  const std::vector<FitResult> fits = fit_sequence(data.snapshots, hp, options);
  for (const FitResult& fit : fits) {
    const BlockStats stats =
        block_counts(data.snapshots.at(fit.posterior.time - 1),
                     fit.assignment);
    CHECK(fit.objective ==
          doctest::Approx(log_posterior(fit.posterior.mean, fit.predicted,
                                        stats))
              .epsilon(1e-9));
  }
}
