#pragma once

// Adjacency spectral embedding and its relatives.
//
// For a graph with adjacency A and target dimension d, the embedding keeps
// the leading d singular triplets of A:
//   U_tilde, V_tilde   unscaled coordinates (n x d)
//   X_tilde = U_tilde Sigma^{1/2},  Y_tilde = V_tilde Sigma^{1/2}
// X_tilde Y_tilde^T is the best rank-d approximation of A in Frobenius norm.

#include <Eigen/Dense>

#include "sbmase/linalg.hpp"
#include "sbmase/sbm_core.hpp"

namespace sbmase {

struct Embedding {
  int d = 0;
  Eigen::VectorXd sigma;
  Eigen::MatrixXd U_tilde;
  Eigen::MatrixXd V_tilde;
  Eigen::MatrixXd X_tilde;
  Eigen::MatrixXd Y_tilde;

  [[nodiscard]] int n() const { return static_cast<int>(U_tilde.rows()); }
  // [U_tilde | V_tilde], n x 2d
  [[nodiscard]] Eigen::MatrixXd W_tilde() const;
  // [X_tilde | Y_tilde], n x 2d
  [[nodiscard]] Eigen::MatrixXd Z_tilde() const;
  // Rank-d approximation X_tilde Y_tilde^T.
  [[nodiscard]] Eigen::MatrixXd low_rank() const;
};

// Real matrix with entries in [0, 1]: edge probabilities, P-hat, the
// normalized Laplacian, or an adjacency matrix with augmented diagonal.
class EdgeProbMatrix {
 public:
  explicit EdgeProbMatrix(Eigen::MatrixXd Q);

  [[nodiscard]] const Eigen::MatrixXd& matrix() const { return Q_; }
  [[nodiscard]] int n() const { return static_cast<int>(Q_.rows()); }

 private:
  Eigen::MatrixXd Q_;
};

Embedding embedding_from_svd(const SvdResult& s);

// 1 <= d <= n.
Embedding embed_adjacency(const Graph& g, int d);
Embedding embed_matrix(const EdgeProbMatrix& Q, int d);

// L = D^{-1/2} A D^{-1/2}; undirected graphs only. Isolated nodes throw
// IsolatedNode.
Eigen::MatrixXd normalized_laplacian(const Graph& g);
Embedding embed_laplacian(const Graph& g, int d);

struct RankEstimate {
  int d_hat = 0;
  double threshold = 0.0;
};
// threshold = 3^{1/4} n^{3/4} (ln n)^{1/4}; d_hat counts singular values of A
// strictly above it.
double rank_threshold(int n);
RankEstimate estimate_rank(const Graph& g);

// A with A_uu replaced by deg(u) / (n - 1).
EdgeProbMatrix augment_diagonal(const Graph& g);

}  // namespace sbmase
