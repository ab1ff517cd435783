#pragma once

// Post-clustering estimation and evaluation.

#include <Eigen/Dense>
#include <vector>

#include "sbmase/sbm_core.hpp"

namespace sbmase {

struct EstimationReport {
  Eigen::VectorXd rho_hat;  // K
  Eigen::MatrixXd P_hat;    // K x K
  Eigen::MatrixXd nu_hat;   // K x d
  Eigen::MatrixXd mu_hat;   // K x d
  std::vector<int> n_hat;   // K
};

// rho_hat_k = n_hat_k / n. P_hat_ij averages A over the estimated block pair,
// using n_hat_i^2 - n_hat_i pairs on the diagonal. (nu_hat, mu_hat) is the
// scaled embedding of P_hat with dimension d. Throws EmptyBlock or
// SingletonBlock.
EstimationReport estimate_params(const Graph& g, const std::vector<int>& tau_hat, int K, int d);

struct MisclassificationResult {
  int errors = 0;
  double rate = 0.0;
  // best_perm[j] is the true label matched to estimated label j.
  std::vector<int> best_perm;
};

// K x K counts, C(i, j) = |{u : tau(u) = i, tau_hat(u) = j}|.
Eigen::MatrixXi confusion_matrix(const std::vector<int>& tau, const std::vector<int>& tau_hat,
                                 int K);

// Exact min over permutations pi of |{u : tau(u) != pi(tau_hat(u))}|.
// Enumerates S_K for K <= 8 and solves the assignment problem above that.
MisclassificationResult misclassification(const std::vector<int>& tau,
                                          const std::vector<int>& tau_hat, int K);

// Maximum-weight perfect matching on a square matrix (Hungarian algorithm).
// Returns assignment[col] = row.
std::vector<int> max_weight_assignment(const Eigen::MatrixXd& weights);

struct AriResult {
  double value = 0.0;
  // Expected and maximal index coincide (e.g. both partitions are a single
  // cluster); value is then 1 by convention.
  bool degenerate = false;
};

// Hubert-Arabie adjusted Rand index. Labels are arbitrary integers.
AriResult adjusted_rand_index(const std::vector<int>& x, const std::vector<int>& y);

struct ProcrustesResult {
  Eigen::MatrixXd R;
  double residual = 0.0;  // || W R - W_tilde ||_F
};

// R = argmin over orthogonal R of || W R - W_tilde ||_F.
ProcrustesResult procrustes_align(const Eigen::MatrixXd& W, const Eigen::MatrixXd& W_tilde);

// Measures || nu_hat - nu R ||_F at the optimal orthogonal R.
ProcrustesResult align_factors(const Eigen::MatrixXd& nu_hat, const Eigen::MatrixXd& nu);

}  // namespace sbmase
