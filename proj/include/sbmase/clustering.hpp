#pragma once

// Square-error clustering of embedded rows:
//   minimize  sum_u || Z_u - psi_{tau(u)} ||^2  over centroids psi and labels tau.
//
// cluster_mse approximates the minimizer with best-of-restarts Lloyd
// iterations seeded by k-means++; cluster_exact enumerates every labeling and
// is the reference for small inputs.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "sbmase/spectral.hpp"

namespace sbmase {

struct Clustering {
  std::vector<int> tau_hat;
  Eigen::MatrixXd centroids;  // K x m
  double objective = 0.0;
  bool has_empty_clusters = false;
  int iterations = 0;    // Lloyd iterations of the winning restart
  int best_restart = 0;
  // Objective after every Lloyd iteration of the winning restart.
  std::vector<double> objective_history;
};

struct KMeansOptions {
  int restarts = 50;
  int max_iters = 300;
  double tol = 1e-10;  // relative objective change
};

// Sum of squared distances of rows to their assigned centroids.
double clustering_objective(const Eigen::MatrixXd& Z, const std::vector<int>& tau_hat,
                            const Eigen::MatrixXd& centroids);

// Per-cluster means; rows of empty clusters are zero.
Eigen::MatrixXd cluster_means(const Eigen::MatrixXd& Z, const std::vector<int>& tau_hat, int K);

// 1 <= K <= n, restarts >= 1. Deterministic given seed.
Clustering cluster_mse(const Eigen::MatrixXd& Z, int K, const KMeansOptions& options,
                       std::uint64_t seed);

inline constexpr double kMaxExactAssignments = 1e7;

// Global minimum by enumerating all K^n labelings; TooLarge above 1e7.
// Ties keep the first labeling in enumeration order, where node 0 is the most
// significant base-K digit.
Clustering cluster_exact(const Eigen::MatrixXd& Z, int K);

enum class EmbeddingVariant { UnscaledConcat, ScaledConcat, UnscaledLeft, ScaledLeft };

// W_tilde, Z_tilde, U_tilde or X_tilde.
Eigen::MatrixXd select_coordinates(const Embedding& emb, EmbeddingVariant variant);

// K >= 2. Runs cluster_mse with default options on the selected coordinates.
Clustering assign_blocks(const Embedding& emb, EmbeddingVariant variant, int K,
                         std::uint64_t seed);

}  // namespace sbmase
