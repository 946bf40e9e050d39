#include "dynsbm/static_sbm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "dynsbm/num.hpp"

namespace dynsbm {

EdgeProbabilityMatrix make_edge_probabilities(Eigen::MatrixXd theta) {
  if (theta.rows() != theta.cols() || theta.rows() < 1) {
    throw std::invalid_argument("theta must be a square k x k matrix");
  }
  for (Eigen::Index a = 0; a < theta.rows(); ++a) {
    for (Eigen::Index b = 0; b < theta.cols(); ++b) {
      if (!(theta(a, b) > 0.0 && theta(a, b) < 1.0)) {
        throw std::domain_error("theta entries must lie strictly in (0, 1)");
      }
    }
  }
  return EdgeProbabilityMatrix{std::move(theta)};
}

double log_likelihood(const BlockStats& stats,
                      const EdgeProbabilityMatrix& theta) {
  if (stats.k() != theta.k()) {
    throw std::invalid_argument("stats and theta have different class counts");
  }
  double total = 0.0;
  for (int a = 0; a < stats.k(); ++a) {
    for (int b = 0; b < stats.k(); ++b) {
      if (!stats.observed(a, b)) continue;
      const double p = theta.theta(a, b);
      if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("theta entries must lie strictly in (0, 1)");
      }
      total += stats.m(a, b) * std::log(p) +
               (stats.n(a, b) - stats.m(a, b)) * std::log1p(-p);
    }
  }
  return total;
}

MleResult mle_theta(const BlockStats& stats, double epsilon) {
  const int k = stats.k();
  MleResult result;
  result.theta.theta.resize(k, k);
  result.filled.resize(k, k);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      result.filled(a, b) = !stats.observed(a, b);
      result.theta.theta(a, b) =
          stats.observed(a, b) ? clamp_unit(stats.y(a, b), epsilon) : 0.5;
    }
  }
  return result;
}

namespace {

struct KmeansRun {
  std::vector<int> labels;
  double wcss = std::numeric_limits<double>::infinity();
  bool converged = false;
};

Eigen::MatrixXd centroids_of(const Eigen::MatrixXd& points,
                             const std::vector<int>& labels, int k) {
  Eigen::MatrixXd centroids = Eigen::MatrixXd::Zero(k, points.cols());
  std::vector<int> counts(k, 0);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    centroids.row(labels[i]) += points.row(i);
    ++counts[labels[i]];
  }
  for (int c = 0; c < k; ++c) {
    if (counts[c] > 0) centroids.row(c) /= counts[c];
  }
  return centroids;
}

// Moves the point farthest from its current centroid into each empty
// cluster; donors must leave at least one point behind.
void repair_empty_clusters(const Eigen::MatrixXd& points,
                           const Eigen::MatrixXd& centroids,
                           std::vector<int>& labels, int k) {
  std::vector<int> counts(k, 0);
  for (int l : labels) ++counts[l];
  for (int c = 0; c < k; ++c) {
    if (counts[c] > 0) continue;
    int farthest = -1;
    double best = -1.0;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      if (counts[labels[i]] < 2) continue;
      double d = (points.row(i) - centroids.row(labels[i])).squaredNorm();
      if (d > best) {
        best = d;
        farthest = static_cast<int>(i);
      }
    }
    if (farthest < 0) continue;  // fewer points than clusters
    --counts[labels[farthest]];
    labels[farthest] = c;
    ++counts[c];
  }
}

KmeansRun kmeans_once(const Eigen::MatrixXd& points, int k, int max_iters,
                      std::mt19937_64& rng) {
  const int n = static_cast<int>(points.rows());
  // Seed centroids from k distinct rows (partial Fisher-Yates).
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  for (int i = 0; i < k; ++i) {
    int j = i + static_cast<int>(rng() % static_cast<std::uint64_t>(n - i));
    std::swap(order[i], order[j]);
  }
  Eigen::MatrixXd centroids(k, points.cols());
  for (int c = 0; c < k; ++c) centroids.row(c) = points.row(order[c]);

  KmeansRun run;
  run.labels.assign(n, 0);
  std::vector<int> previous(n, -1);
  for (int iter = 0; iter < max_iters; ++iter) {
    for (int i = 0; i < n; ++i) {
      int best_c = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        double d = (points.row(i) - centroids.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best_c = c;
        }
      }
      run.labels[i] = best_c;
    }
    repair_empty_clusters(points, centroids, run.labels, k);
    if (run.labels == previous) {
      run.converged = true;
      break;
    }
    previous = run.labels;
    centroids = centroids_of(points, run.labels, k);
  }

  centroids = centroids_of(points, run.labels, k);
  run.wcss = 0.0;
  for (int i = 0; i < n; ++i) {
    run.wcss += (points.row(i) - centroids.row(run.labels[i])).squaredNorm();
  }
  return run;
}

}  // namespace

SpectralResult spectral_init(const Snapshot& snapshot, int k,
                             const SpectralConfig& config) {
  const int n = snapshot.node_count();
  if (k < 1 || k > n) {
    throw std::invalid_argument("class count must satisfy 1 <= k <= nodes");
  }
  if (k == 1) {
    return SpectralResult{ClassAssignment(std::vector<int>(n, 0), 1), true};
  }
  const int rank = config.embedding_rank > 0 ? config.embedding_rank : k;
  if (rank > n) throw std::invalid_argument("embedding rank exceeds nodes");

  Eigen::MatrixXd adj = snapshot.adjacency().cast<double>();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(adj,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd scale = svd.singularValues().head(rank).cwiseSqrt();
  Eigen::MatrixXd embedding(n, 2 * rank);
  embedding.leftCols(rank) = svd.matrixU().leftCols(rank) * scale.asDiagonal();
  embedding.rightCols(rank) = svd.matrixV().leftCols(rank) * scale.asDiagonal();

  std::mt19937_64 rng(config.seed);
  KmeansRun best;
  for (int r = 0; r < std::max(1, config.kmeans_restarts); ++r) {
    KmeansRun run =
        kmeans_once(embedding, k, config.kmeans_max_iterations, rng);
    if (run.wcss < best.wcss) best = run;
  }
  return SpectralResult{ClassAssignment(best.labels, k), best.converged};
}

}  // namespace dynsbm
