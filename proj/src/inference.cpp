#include "sbmase/inference.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "sbmase/error.hpp"
#include "sbmase/spectral.hpp"

namespace sbmase {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::MatrixXi;
using Eigen::VectorXd;

namespace {

constexpr int kMaxExhaustiveK = 8;

void check_labels(const std::vector<int>& labels, int K, const char* what) {
  for (int label : labels) {
    if (label < 0 || label >= K) {
      throw PreconditionError(std::string(what) + ": label " + std::to_string(label) +
                              " outside [0, " + std::to_string(K) + ")");
    }
  }
}

double pairs(double count) { return count * (count - 1.0) / 2.0; }

}  // namespace

EstimationReport estimate_params(const Graph& g, const std::vector<int>& tau_hat, int K, int d) {
  const int n = g.n();
  if (static_cast<int>(tau_hat.size()) != n) throw PreconditionError("tau_hat must have length n");
  if (K < 1) throw PreconditionError("K must be positive");
  check_labels(tau_hat, K, "estimate_params");
  if (d < 1 || d > K) throw PreconditionError("estimate_params: d must lie in [1, K]");

  EstimationReport r;
  r.n_hat.assign(static_cast<std::size_t>(K), 0);
  for (int label : tau_hat) ++r.n_hat[static_cast<std::size_t>(label)];
  for (int k = 0; k < K; ++k) {
    const int count = r.n_hat[static_cast<std::size_t>(k)];
    if (count == 0) throw EmptyBlock("estimated block " + std::to_string(k) + " is empty");
    if (count == 1) {
      throw SingletonBlock("estimated block " + std::to_string(k) +
                           " has one node; its diagonal entry of P-hat is undefined");
    }
  }
  r.rho_hat = Eigen::Map<const Eigen::VectorXi>(r.n_hat.data(), K).cast<double>() / n;

  MatrixXd sums = MatrixXd::Zero(K, K);
  const MatrixXd& A = g.adjacency();
  for (int v = 0; v < n; ++v) {
    const int bv = tau_hat[static_cast<std::size_t>(v)];
    for (int u = 0; u < n; ++u) sums(tau_hat[static_cast<std::size_t>(u)], bv) += A(u, v);
  }
  r.P_hat.resize(K, K);
  for (int i = 0; i < K; ++i) {
    const double ni = r.n_hat[static_cast<std::size_t>(i)];
    for (int j = 0; j < K; ++j) {
      const double nj = r.n_hat[static_cast<std::size_t>(j)];
      r.P_hat(i, j) = i == j ? sums(i, j) / (ni * ni - ni) : sums(i, j) / (ni * nj);
    }
  }

  const Embedding factors = embed_matrix(EdgeProbMatrix(r.P_hat), d);
  r.nu_hat = factors.X_tilde;
  r.mu_hat = factors.Y_tilde;
  return r;
}

MatrixXi confusion_matrix(const std::vector<int>& tau, const std::vector<int>& tau_hat, int K) {
  if (tau.size() != tau_hat.size()) throw PreconditionError("label vectors differ in length");
  check_labels(tau, K, "confusion_matrix");
  check_labels(tau_hat, K, "confusion_matrix");
  MatrixXi c = MatrixXi::Zero(K, K);
  for (std::size_t u = 0; u < tau.size(); ++u) ++c(tau[u], tau_hat[u]);
  return c;
}

std::vector<int> max_weight_assignment(const MatrixXd& weights) {
  const auto n = static_cast<int>(weights.rows());
  if (weights.cols() != n) throw PreconditionError("assignment matrix must be square");
  if (n == 0) return {};
  const double top = weights.maxCoeff();
  const double inf = std::numeric_limits<double>::infinity();
  // Minimum-cost formulation with 1-based potentials.
  std::vector<double> row_pot(n + 1, 0.0);
  std::vector<double> col_pot(n + 1, 0.0);
  std::vector<int> match(n + 1, 0);  // match[col] = row
  std::vector<int> way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> min_slack(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = match[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cost = (top - weights(i0 - 1, j - 1)) - row_pot[i0] - col_pot[j];
        if (cost < min_slack[j]) {
          min_slack[j] = cost;
          way[j] = j0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          row_pot[match[j]] += delta;
          col_pot[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) assignment[static_cast<std::size_t>(j - 1)] = match[j] - 1;
  return assignment;
}

MisclassificationResult misclassification(const std::vector<int>& tau,
                                          const std::vector<int>& tau_hat, int K) {
  if (K < 1) throw PreconditionError("K must be positive");
  const MatrixXi c = confusion_matrix(tau, tau_hat, K);
  const auto n = static_cast<int>(tau.size());

  MisclassificationResult r;
  if (K <= kMaxExhaustiveK) {
    std::vector<int> perm(static_cast<std::size_t>(K));
    std::iota(perm.begin(), perm.end(), 0);
    int best = -1;
    do {
      int matched = 0;
      for (int j = 0; j < K; ++j) matched += c(perm[static_cast<std::size_t>(j)], j);
      if (matched > best) {
        best = matched;
        r.best_perm = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    r.errors = n - best;
  } else {
    r.best_perm = max_weight_assignment(c.cast<double>());
    int matched = 0;
    for (int j = 0; j < K; ++j) matched += c(r.best_perm[static_cast<std::size_t>(j)], j);
    r.errors = n - matched;
  }
  r.rate = n > 0 ? static_cast<double>(r.errors) / n : 0.0;
  return r;
}

AriResult adjusted_rand_index(const std::vector<int>& x, const std::vector<int>& y) {
  if (x.size() != y.size()) throw PreconditionError("label vectors differ in length");
  if (x.size() < 2) throw PreconditionError("adjusted_rand_index requires at least 2 items");
  std::map<std::pair<int, int>, double> cells;
  std::map<int, double> rows;
  std::map<int, double> cols;
  for (std::size_t u = 0; u < x.size(); ++u) {
    cells[{x[u], y[u]}] += 1.0;
    rows[x[u]] += 1.0;
    cols[y[u]] += 1.0;
  }
  double index = 0.0;
  for (const auto& [key, count] : cells) index += pairs(count);
  double row_sum = 0.0;
  for (const auto& [key, count] : rows) row_sum += pairs(count);
  double col_sum = 0.0;
  for (const auto& [key, count] : cols) col_sum += pairs(count);

  const double expected = row_sum * col_sum / pairs(static_cast<double>(x.size()));
  const double maximum = 0.5 * (row_sum + col_sum);
  if (maximum == expected) return AriResult{1.0, true};
  return AriResult{(index - expected) / (maximum - expected), false};
}

ProcrustesResult procrustes_align(const MatrixXd& W, const MatrixXd& W_tilde) {
  if (W.rows() != W_tilde.rows() || W.cols() != W_tilde.cols()) {
    throw PreconditionError("procrustes_align: shapes differ");
  }
  const MatrixXd cross = W.transpose() * W_tilde;
  Eigen::JacobiSVD<MatrixXd> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  ProcrustesResult r;
  r.R = svd.matrixU() * svd.matrixV().transpose();
  r.residual = (W * r.R - W_tilde).norm();
  return r;
}

ProcrustesResult align_factors(const MatrixXd& nu_hat, const MatrixXd& nu) {
  return procrustes_align(nu, nu_hat);
}

}  // namespace sbmase
