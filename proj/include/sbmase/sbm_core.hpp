#pragma once

// Stochastic blockmodel parameters, the RDPG factorization P = nu mu^T, the
// model constants (alpha, beta, gamma) and samplers for block labels and
// adjacency matrices.
//
// Labels are 0-based throughout: block i of a K-block model is label i-1 in
// mathematical notation.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

namespace sbmase {

class BlockModel {
 public:
  // Validates: P square in [0,1]; rho positive, summing to 1 within 1e-12;
  // P symmetric within 1e-12 when undirected. declared_rank defaults to the
  // numerical rank of P (singular values above 1e-10 * sigma_1).
  //
  // Distinguishability of blocks is not enforced here; compute_constants
  // reports it as DegenerateModel (beta = 0).
  static BlockModel make(Eigen::MatrixXd P, Eigen::VectorXd rho, bool directed,
                         std::optional<int> declared_rank = std::nullopt);

  [[nodiscard]] int K() const { return static_cast<int>(P_.rows()); }
  [[nodiscard]] const Eigen::MatrixXd& P() const { return P_; }
  [[nodiscard]] const Eigen::VectorXd& rho() const { return rho_; }
  [[nodiscard]] bool directed() const { return directed_; }
  [[nodiscard]] int rank() const { return rank_; }

  // Row i differs from row j or column i differs from column j, for all i != j.
  [[nodiscard]] bool distinguishable(double tol = 1e-12) const;

  // Same model with P' = p P (missing-edge thinning).
  [[nodiscard]] BlockModel thinned(double keep_prob) const;

 private:
  BlockModel(Eigen::MatrixXd P, Eigen::VectorXd rho, bool directed, int rank)
      : P_(std::move(P)), rho_(std::move(rho)), directed_(directed), rank_(rank) {}

  Eigen::MatrixXd P_;
  Eigen::VectorXd rho_;
  bool directed_;
  int rank_;
};

struct RdpgFactors {
  Eigen::MatrixXd nu;  // K x d
  Eigen::MatrixXd mu;  // K x d
};

struct ModelConstants {
  double alpha = 0.0;
  double beta = 0.0;  // +infinity when K = 1 (no pair of blocks exists)
  double gamma = 0.0;
  bool beta_defined = true;
};

struct BlockAssignment {
  std::vector<int> tau;     // length n, labels in [0, K)
  std::vector<int> counts;  // length K

  [[nodiscard]] int n() const { return static_cast<int>(tau.size()); }
  [[nodiscard]] int K() const { return static_cast<int>(counts.size()); }

  // Validates labels and derives counts.
  static BlockAssignment from_labels(std::vector<int> tau, int K);
};

class Graph {
 public:
  // Empty graph on n nodes.
  Graph(int n, bool directed);

  // Validates 0/1 entries, zero diagonal and symmetry when undirected.
  static Graph from_adjacency(Eigen::MatrixXd A, bool directed);

  [[nodiscard]] int n() const { return static_cast<int>(A_.rows()); }
  [[nodiscard]] bool directed() const { return directed_; }
  [[nodiscard]] const Eigen::MatrixXd& adjacency() const { return A_; }

  // Row sums (out-degree when directed).
  [[nodiscard]] Eigen::VectorXd degrees() const;
  [[nodiscard]] long long edge_count() const;

  // Sets A_uv (and A_vu when undirected). Rejects loops and ids outside [0, n).
  void add_edge(int u, int v);

 private:
  Graph(Eigen::MatrixXd A, bool directed) : A_(std::move(A)), directed_(directed) {}

  Eigen::MatrixXd A_;
  bool directed_;
};

enum class TauMode { Multinomial, Exact };

// nu = U_P Sigma^{1/2}, mu = V_P Sigma^{1/2} from the rank-d SVD of P.
// Throws DegenerateRank when the numerical rank of P differs from model.rank().
RdpgFactors factorize_p(const BlockModel& model);

// Tight constants: alpha = min eigenvalue over nu^T nu and mu^T mu;
// beta = min over i != j of max(|nu_i - nu_j|, |mu_i - mu_j|); gamma = min rho.
// Throws DegenerateModel when beta = 0.
ModelConstants compute_constants(const BlockModel& model, const RdpgFactors& factors);

// Largest-remainder apportionment of n over rho, ties to the lower block index.
std::vector<int> exact_block_counts(const Eigen::VectorXd& rho, int n);

BlockAssignment sample_tau(const BlockModel& model, int n, TauMode mode, std::uint64_t seed);

// Directed: each ordered pair u != v is Bernoulli(keep * P[tau u, tau v]).
// Undirected: each unordered pair is drawn once and mirrored. The draw for the
// pair (u, v) (u < v when undirected) comes from counter index u * n + v.
Graph sample_graph(const BlockModel& model, const BlockAssignment& tau, std::uint64_t seed,
                   double edge_keep_prob = 1.0);

// X (rows nu_{tau(u)}) and Y (rows mu_{tau(u)}).
struct LatentPositions {
  Eigen::MatrixXd X;
  Eigen::MatrixXd Y;
};
LatentPositions latent_positions(const RdpgFactors& factors, const BlockAssignment& tau);

// Q_uv = keep * P[tau(u), tau(v)] for all u, v including the diagonal. Equals
// keep * X Y^T but is assembled from P directly, so it is exactly symmetric
// for undirected models.
Eigen::MatrixXd edge_probability_matrix(const BlockModel& model, const BlockAssignment& tau,
                                        double edge_keep_prob = 1.0);

}  // namespace sbmase
