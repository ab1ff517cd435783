#include "sbmase/clustering.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "sbmase/error.hpp"
#include "sbmase/rng.hpp"

namespace sbmase {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double squared_distance(const MatrixXd& Z, Index u, const MatrixXd& centroids, Index k) {
  return (Z.row(u) - centroids.row(k)).squaredNorm();
}

// Nearest centroid; the lowest index wins ties.
int nearest(const MatrixXd& Z, Index u, const MatrixXd& centroids) {
  int best = 0;
  double best_d = squared_distance(Z, u, centroids, 0);
  for (Index k = 1; k < centroids.rows(); ++k) {
    const double dist = squared_distance(Z, u, centroids, k);
    if (dist < best_d) {
      best_d = dist;
      best = static_cast<int>(k);
    }
  }
  return best;
}

MatrixXd kmeans_plus_plus(const MatrixXd& Z, int K, Rng& rng) {
  const Index n = Z.rows();
  MatrixXd centroids(K, Z.cols());
  centroids.row(0) = Z.row(static_cast<Index>(rng.below(static_cast<std::uint64_t>(n))));
  VectorXd weight(n);
  for (Index u = 0; u < n; ++u) weight(u) = squared_distance(Z, u, centroids, 0);
  for (int k = 1; k < K; ++k) {
    const double total = weight.sum();
    Index pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double running = 0.0;
      pick = -1;
      for (Index u = 0; u < n; ++u) {
        running += weight(u);
        if (weight(u) > 0.0) pick = u;
        if (running > target && weight(u) > 0.0) break;
      }
    } else {
      pick = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    }
    centroids.row(k) = Z.row(pick);
    for (Index u = 0; u < n; ++u) {
      weight(u) = std::min(weight(u), squared_distance(Z, u, centroids, k));
    }
  }
  return centroids;
}

// Moves the globally farthest point into each empty cluster. Returns true if
// some cluster stays empty (all points coincide with their centroids).
bool repair_empty(const MatrixXd& Z, std::vector<int>& labels, MatrixXd& centroids,
                  std::vector<int>& counts) {
  bool still_empty = false;
  for (Index k = 0; k < centroids.rows(); ++k) {
    if (counts[static_cast<std::size_t>(k)] > 0) continue;
    Index far = -1;
    double far_d = 0.0;
    for (Index u = 0; u < Z.rows(); ++u) {
      const int lu = labels[static_cast<std::size_t>(u)];
      if (counts[static_cast<std::size_t>(lu)] < 2) continue;
      const double dist = squared_distance(Z, u, centroids, lu);
      if (dist > far_d) {
        far_d = dist;
        far = u;
      }
    }
    if (far < 0) {
      still_empty = true;
      continue;
    }
    --counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(far)])];
    labels[static_cast<std::size_t>(far)] = static_cast<int>(k);
    counts[static_cast<std::size_t>(k)] = 1;
    centroids.row(k) = Z.row(far);
  }
  return still_empty;
}

Clustering lloyd(const MatrixXd& Z, MatrixXd centroids, const KMeansOptions& options) {
  const Index n = Z.rows();
  const auto K = static_cast<int>(centroids.rows());
  Clustering c;
  c.tau_hat.assign(static_cast<std::size_t>(n), -1);
  std::vector<int> previous;
  double previous_objective = std::numeric_limits<double>::infinity();
  for (int it = 0; it < options.max_iters; ++it) {
    std::vector<int> counts(static_cast<std::size_t>(K), 0);
    for (Index u = 0; u < n; ++u) {
      const int k = nearest(Z, u, centroids);
      c.tau_hat[static_cast<std::size_t>(u)] = k;
      ++counts[static_cast<std::size_t>(k)];
    }
    c.has_empty_clusters = repair_empty(Z, c.tau_hat, centroids, counts);

    const MatrixXd means = cluster_means(Z, c.tau_hat, K);
    for (int k = 0; k < K; ++k) {
      if (counts[static_cast<std::size_t>(k)] > 0) centroids.row(k) = means.row(k);
    }
    c.objective = clustering_objective(Z, c.tau_hat, centroids);
    c.objective_history.push_back(c.objective);
    c.iterations = it + 1;

    if (c.tau_hat == previous) break;
    if (previous_objective - c.objective <= options.tol * previous_objective) break;
    previous = c.tau_hat;
    previous_objective = c.objective;
  }
  c.centroids = std::move(centroids);
  return c;
}

}  // namespace

double clustering_objective(const MatrixXd& Z, const std::vector<int>& tau_hat,
                            const MatrixXd& centroids) {
  double total = 0.0;
  for (Index u = 0; u < Z.rows(); ++u) {
    total += squared_distance(Z, u, centroids, tau_hat[static_cast<std::size_t>(u)]);
  }
  return total;
}

MatrixXd cluster_means(const MatrixXd& Z, const std::vector<int>& tau_hat, int K) {
  MatrixXd sums = MatrixXd::Zero(K, Z.cols());
  VectorXd counts = VectorXd::Zero(K);
  for (Index u = 0; u < Z.rows(); ++u) {
    const int k = tau_hat[static_cast<std::size_t>(u)];
    sums.row(k) += Z.row(u);
    counts(k) += 1.0;
  }
  for (int k = 0; k < K; ++k) {
    if (counts(k) > 0.0) sums.row(k) /= counts(k);
  }
  return sums;
}

Clustering cluster_mse(const MatrixXd& Z, int K, const KMeansOptions& options,
                       std::uint64_t seed) {
  const auto n = static_cast<int>(Z.rows());
  if (K < 1 || K > n) {
    throw PreconditionError("cluster_mse: K=" + std::to_string(K) + " outside [1, " +
                            std::to_string(n) + "]");
  }
  if (options.restarts < 1 || options.max_iters < 1) {
    throw PreconditionError("cluster_mse: restarts and max_iters must be positive");
  }
  if (!Z.allFinite()) throw PreconditionError("cluster_mse: non-finite coordinates");

  Clustering best;
  best.objective = std::numeric_limits<double>::infinity();
  for (int r = 0; r < options.restarts; ++r) {
    Rng rng(derive_seed(seed, {kClusterStream, static_cast<std::uint64_t>(r)}));
    Clustering c = lloyd(Z, kmeans_plus_plus(Z, K, rng), options);
    if (c.objective < best.objective) {
      c.best_restart = r;
      best = std::move(c);
    }
  }
  return best;
}

Clustering cluster_exact(const MatrixXd& Z, int K) {
  const auto n = static_cast<int>(Z.rows());
  if (K < 1 || K > n) throw PreconditionError("cluster_exact: K outside [1, n]");
  if (std::pow(static_cast<double>(K), n) > kMaxExactAssignments) {
    throw TooLarge("cluster_exact: " + std::to_string(K) + "^" + std::to_string(n) +
                   " labelings exceed the enumeration limit");
  }

  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  std::vector<int> best_labels = labels;
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    const MatrixXd means = cluster_means(Z, labels, K);
    const double objective = clustering_objective(Z, labels, means);
    if (objective < best * (1.0 - 1e-12)) {
      best = objective;
      best_labels = labels;
    }
    // Odometer increment, node n-1 is the least significant digit.
    int pos = n - 1;
    while (pos >= 0 && labels[static_cast<std::size_t>(pos)] == K - 1) {
      labels[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++labels[static_cast<std::size_t>(pos)];
  }

  Clustering c;
  c.tau_hat = std::move(best_labels);
  c.centroids = cluster_means(Z, c.tau_hat, K);
  c.objective = clustering_objective(Z, c.tau_hat, c.centroids);
  std::vector<int> counts(static_cast<std::size_t>(K), 0);
  for (int label : c.tau_hat) ++counts[static_cast<std::size_t>(label)];
  for (int count : counts) c.has_empty_clusters |= (count == 0);
  return c;
}

MatrixXd select_coordinates(const Embedding& emb, EmbeddingVariant variant) {
  switch (variant) {
    case EmbeddingVariant::UnscaledConcat:
      return emb.W_tilde();
    case EmbeddingVariant::ScaledConcat:
      return emb.Z_tilde();
    case EmbeddingVariant::UnscaledLeft:
      return emb.U_tilde;
    case EmbeddingVariant::ScaledLeft:
      return emb.X_tilde;
  }
  throw PreconditionError("unknown embedding variant");
}

Clustering assign_blocks(const Embedding& emb, EmbeddingVariant variant, int K,
                         std::uint64_t seed) {
  if (K < 2) throw PreconditionError("assign_blocks requires K >= 2");
  return cluster_mse(select_coordinates(emb, variant), K, KMeansOptions{}, seed);
}

}  // namespace sbmase
