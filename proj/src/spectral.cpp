#include "sbmase/spectral.hpp"

#include <cmath>
#include <string>

#include "sbmase/error.hpp"

namespace sbmase {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

void check_dimension(int d, int n) {
  if (d < 1 || d > n) {
    throw PreconditionError("embedding dimension " + std::to_string(d) + " outside [1, " +
                            std::to_string(n) + "]");
  }
}

}  // namespace

MatrixXd Embedding::W_tilde() const {
  MatrixXd w(U_tilde.rows(), 2 * d);
  w << U_tilde, V_tilde;
  return w;
}

MatrixXd Embedding::Z_tilde() const {
  MatrixXd z(X_tilde.rows(), 2 * d);
  z << X_tilde, Y_tilde;
  return z;
}

MatrixXd Embedding::low_rank() const { return X_tilde * Y_tilde.transpose(); }

EdgeProbMatrix::EdgeProbMatrix(MatrixXd Q) : Q_(std::move(Q)) {
  if (Q_.rows() == 0 || Q_.rows() != Q_.cols()) throw PreconditionError("Q must be square");
  if (!Q_.allFinite() || (Q_.array() < 0.0).any() || (Q_.array() > 1.0).any()) {
    throw PreconditionError("entries of Q must lie in [0, 1]");
  }
}

Embedding embedding_from_svd(const SvdResult& s) {
  Embedding e;
  e.d = static_cast<int>(s.sigma.size());
  e.sigma = s.sigma;
  e.U_tilde = s.U;
  e.V_tilde = s.V;
  const VectorXd root = s.sigma.cwiseSqrt();
  e.X_tilde = s.U * root.asDiagonal();
  e.Y_tilde = s.V * root.asDiagonal();
  return e;
}

Embedding embed_adjacency(const Graph& g, int d) {
  check_dimension(d, g.n());
  return embedding_from_svd(truncated_svd(g.adjacency(), d));
}

Embedding embed_matrix(const EdgeProbMatrix& Q, int d) {
  check_dimension(d, Q.n());
  return embedding_from_svd(truncated_svd(Q.matrix(), d));
}

MatrixXd normalized_laplacian(const Graph& g) {
  if (g.directed()) throw PreconditionError("normalized Laplacian requires an undirected graph");
  const VectorXd deg = g.degrees();
  for (int u = 0; u < g.n(); ++u) {
    if (deg(u) == 0.0) throw IsolatedNode("node " + std::to_string(u) + " has degree 0");
  }
  const VectorXd inv_root = deg.cwiseSqrt().cwiseInverse();
  return inv_root.asDiagonal() * g.adjacency() * inv_root.asDiagonal();
}

Embedding embed_laplacian(const Graph& g, int d) {
  check_dimension(d, g.n());
  return embedding_from_svd(truncated_svd(normalized_laplacian(g), d));
}

double rank_threshold(int n) {
  const double nn = n;
  return std::pow(3.0, 0.25) * std::pow(nn, 0.75) * std::pow(std::log(nn), 0.25);
}

RankEstimate estimate_rank(const Graph& g) {
  if (g.n() < 2) throw PreconditionError("estimate_rank requires n >= 2");
  RankEstimate r;
  r.threshold = rank_threshold(g.n());
  const VectorXd s = singular_values(g.adjacency());
  r.d_hat = static_cast<int>((s.array() > r.threshold).count());
  return r;
}

EdgeProbMatrix augment_diagonal(const Graph& g) {
  MatrixXd m = g.adjacency();
  if (g.n() > 1) m.diagonal() = g.degrees() / static_cast<double>(g.n() - 1);
  return EdgeProbMatrix(std::move(m));
}

}  // namespace sbmase
