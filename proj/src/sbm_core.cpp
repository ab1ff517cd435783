#include "sbmase/sbm_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sbmase/error.hpp"
#include "sbmase/linalg.hpp"
#include "sbmase/rng.hpp"

namespace sbmase {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kRankTolerance = 1e-10;
constexpr double kModelTolerance = 1e-12;

}  // namespace

BlockModel BlockModel::make(MatrixXd P, VectorXd rho, bool directed,
                            std::optional<int> declared_rank) {
  if (P.rows() == 0 || P.rows() != P.cols()) throw InvalidModel("P must be a nonempty square matrix");
  if (rho.size() != P.rows()) throw InvalidModel("rho must have length K");
  if (!P.allFinite() || (P.array() < 0.0).any() || (P.array() > 1.0).any()) {
    throw InvalidModel("entries of P must lie in [0, 1]");
  }
  if (!rho.allFinite() || (rho.array() <= 0.0).any()) {
    throw InvalidModel("entries of rho must be strictly positive");
  }
  if (std::abs(rho.sum() - 1.0) > kModelTolerance) throw InvalidModel("rho must sum to 1");
  if (!directed && ((P - P.transpose()).cwiseAbs().maxCoeff() > kModelTolerance)) {
    throw InvalidModel("undirected model requires symmetric P");
  }
  if (!directed) P = 0.5 * (P + P.transpose()).eval();

  const int rank = declared_rank.value_or(static_cast<int>(numerical_rank(P, kRankTolerance)));
  if (rank < 0 || rank > P.rows()) throw InvalidModel("declared rank outside [0, K]");
  return BlockModel(std::move(P), std::move(rho), directed, rank);
}

bool BlockModel::distinguishable(double tol) const {
  for (int i = 0; i < K(); ++i) {
    for (int j = i + 1; j < K(); ++j) {
      const double row_gap = (P_.row(i) - P_.row(j)).cwiseAbs().maxCoeff();
      const double col_gap = (P_.col(i) - P_.col(j)).cwiseAbs().maxCoeff();
      if (row_gap <= tol && col_gap <= tol) return false;
    }
  }
  return true;
}

BlockModel BlockModel::thinned(double keep_prob) const {
  if (!(keep_prob > 0.0 && keep_prob <= 1.0)) throw PreconditionError("keep_prob must be in (0, 1]");
  return BlockModel(keep_prob * P_, rho_, directed_, rank_);
}

BlockAssignment BlockAssignment::from_labels(std::vector<int> tau, int K) {
  if (K < 1) throw PreconditionError("K must be positive");
  std::vector<int> counts(static_cast<std::size_t>(K), 0);
  for (int label : tau) {
    if (label < 0 || label >= K) {
      throw PreconditionError("label " + std::to_string(label) + " outside [0, " +
                              std::to_string(K) + ")");
    }
    ++counts[static_cast<std::size_t>(label)];
  }
  return BlockAssignment{std::move(tau), std::move(counts)};
}

Graph::Graph(int n, bool directed) : A_(MatrixXd::Zero(n, n)), directed_(directed) {
  if (n < 1) throw PreconditionError("graph needs at least one node");
}

Graph Graph::from_adjacency(MatrixXd A, bool directed) {
  if (A.rows() == 0 || A.rows() != A.cols()) throw PreconditionError("adjacency must be square");
  if (!((A.array() == 0.0) || (A.array() == 1.0)).all()) {
    throw PreconditionError("adjacency entries must be 0 or 1");
  }
  if ((A.diagonal().array() != 0.0).any()) throw SelfLoop("adjacency has a nonzero diagonal");
  if (!directed && !is_exactly_symmetric(A)) {
    throw PreconditionError("undirected adjacency must be symmetric");
  }
  return Graph(std::move(A), directed);
}

VectorXd Graph::degrees() const { return A_.rowwise().sum(); }

long long Graph::edge_count() const {
  const auto ones = static_cast<long long>(A_.sum());
  return directed_ ? ones : ones / 2;
}

void Graph::add_edge(int u, int v) {
  if (u < 0 || v < 0 || u >= n() || v >= n()) {
    throw OutOfRange("edge (" + std::to_string(u) + ", " + std::to_string(v) + ") outside [0, " +
                     std::to_string(n()) + ")");
  }
  if (u == v) throw SelfLoop("self-loop at node " + std::to_string(u));
  A_(u, v) = 1.0;
  if (!directed_) A_(v, u) = 1.0;
}

RdpgFactors factorize_p(const BlockModel& model) {
  const Index K = model.K();
  const Index d = model.rank();
  const Index actual = numerical_rank(model.P(), kRankTolerance);
  if (actual < d) {
    throw DegenerateRank("numerical rank of P is " + std::to_string(actual) +
                         ", below the declared rank " + std::to_string(d));
  }
  if (actual > d) {
    throw DegenerateRank("numerical rank of P is " + std::to_string(actual) +
                         ", above the declared rank " + std::to_string(d) +
                         "; a rank-d factorization cannot reproduce P");
  }
  if (d == 0) return RdpgFactors{MatrixXd::Zero(K, 0), MatrixXd::Zero(K, 0)};

  const SvdResult s = truncated_svd(model.P(), d);
  const VectorXd root = s.sigma.cwiseSqrt();
  RdpgFactors f{s.U * root.asDiagonal(), s.V * root.asDiagonal()};
  const double err = (f.nu * f.mu.transpose() - model.P()).cwiseAbs().maxCoeff();
  if (err > 1e-10) {
    throw DegenerateRank("factorization residual " + std::to_string(err) + " exceeds 1e-10");
  }
  return f;
}

ModelConstants compute_constants(const BlockModel& model, const RdpgFactors& factors) {
  if (factors.nu.rows() != model.K() || factors.mu.rows() != model.K() ||
      factors.nu.cols() != factors.mu.cols() || factors.nu.cols() == 0) {
    throw PreconditionError("factors must be K x d with d >= 1");
  }
  ModelConstants c;
  const MatrixXd gram_nu = factors.nu.transpose() * factors.nu;
  const MatrixXd gram_mu = factors.mu.transpose() * factors.mu;
  const double min_nu = Eigen::SelfAdjointEigenSolver<MatrixXd>(gram_nu).eigenvalues().minCoeff();
  const double min_mu = Eigen::SelfAdjointEigenSolver<MatrixXd>(gram_mu).eigenvalues().minCoeff();
  c.alpha = std::min(min_nu, min_mu);
  c.gamma = model.rho().minCoeff();

  const int K = model.K();
  if (K == 1) {
    c.beta = std::numeric_limits<double>::infinity();
    c.beta_defined = false;
    return c;
  }
  c.beta = std::numeric_limits<double>::infinity();
  for (int i = 0; i < K; ++i) {
    for (int j = i + 1; j < K; ++j) {
      const double gap = std::max((factors.nu.row(i) - factors.nu.row(j)).norm(),
                                  (factors.mu.row(i) - factors.mu.row(j)).norm());
      c.beta = std::min(c.beta, gap);
    }
  }
  if (c.beta <= kModelTolerance) {
    throw DegenerateModel("two blocks have identical latent vectors (beta = 0)");
  }
  return c;
}

std::vector<int> exact_block_counts(const VectorXd& rho, int n) {
  const auto K = static_cast<std::size_t>(rho.size());
  std::vector<int> counts(K);
  std::vector<double> remainder(K);
  int assigned = 0;
  for (std::size_t i = 0; i < K; ++i) {
    const double quota = rho(static_cast<Index>(i)) * n;
    // Absorb representation error such as 0.6 * 10 = 5.999...
    const double base = std::floor(quota + 1e-9);
    counts[i] = static_cast<int>(base);
    remainder[i] = std::max(0.0, quota - base);
    assigned += counts[i];
  }
  std::vector<std::size_t> order(K);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++counts[order[k % K]];
  return counts;
}

BlockAssignment sample_tau(const BlockModel& model, int n, TauMode mode, std::uint64_t seed) {
  if (n < 1) throw PreconditionError("n must be at least 1");
  Rng rng(derive_seed(seed, {kTauStream}));
  const int K = model.K();
  std::vector<int> tau(static_cast<std::size_t>(n));
  if (mode == TauMode::Exact) {
    const std::vector<int> counts = exact_block_counts(model.rho(), n);
    auto it = tau.begin();
    for (int i = 0; i < K; ++i) it = std::fill_n(it, counts[static_cast<std::size_t>(i)], i);
    rng.shuffle(std::span<int>(tau));
  } else {
    VectorXd cumulative(K);
    std::partial_sum(model.rho().begin(), model.rho().end(), cumulative.begin());
    for (int& label : tau) {
      const double x = rng.uniform() * cumulative(K - 1);
      label = 0;
      while (label < K - 1 && x >= cumulative(label)) ++label;
    }
  }
  return BlockAssignment::from_labels(std::move(tau), K);
}

Graph sample_graph(const BlockModel& model, const BlockAssignment& tau, std::uint64_t seed,
                   double edge_keep_prob) {
  if (!(edge_keep_prob > 0.0 && edge_keep_prob <= 1.0)) {
    throw PreconditionError("edge_keep_prob must be in (0, 1]");
  }
  if (tau.K() != model.K()) throw PreconditionError("assignment and model disagree on K");
  const int n = tau.n();
  const CounterStream stream(derive_seed(seed, {kEdgeStream}));
  const MatrixXd p = edge_keep_prob * model.P();
  MatrixXd A = MatrixXd::Zero(n, n);
  const auto un = static_cast<std::uint64_t>(n);
  for (int u = 0; u < n; ++u) {
    const int bu = tau.tau[static_cast<std::size_t>(u)];
    const int v0 = model.directed() ? 0 : u + 1;
    for (int v = v0; v < n; ++v) {
      if (v == u) continue;
      const double prob = p(bu, tau.tau[static_cast<std::size_t>(v)]);
      const std::uint64_t index = static_cast<std::uint64_t>(u) * un + static_cast<std::uint64_t>(v);
      if (stream.uniform(index) < prob) {
        A(u, v) = 1.0;
        if (!model.directed()) A(v, u) = 1.0;
      }
    }
  }
  return Graph::from_adjacency(std::move(A), model.directed());
}

LatentPositions latent_positions(const RdpgFactors& factors, const BlockAssignment& tau) {
  const Index d = factors.nu.cols();
  LatentPositions lp{MatrixXd(tau.n(), d), MatrixXd(tau.n(), d)};
  for (int u = 0; u < tau.n(); ++u) {
    const int b = tau.tau[static_cast<std::size_t>(u)];
    lp.X.row(u) = factors.nu.row(b);
    lp.Y.row(u) = factors.mu.row(b);
  }
  return lp;
}

MatrixXd edge_probability_matrix(const BlockModel& model, const BlockAssignment& tau,
                                 double edge_keep_prob) {
  if (tau.K() != model.K()) throw PreconditionError("assignment and model disagree on K");
  const int n = tau.n();
  MatrixXd Q(n, n);
  for (int v = 0; v < n; ++v) {
    const int bv = tau.tau[static_cast<std::size_t>(v)];
    for (int u = 0; u < n; ++u) {
      Q(u, v) = edge_keep_prob * model.P()(tau.tau[static_cast<std::size_t>(u)], bv);
    }
  }
  return Q;
}

}  // namespace sbmase
