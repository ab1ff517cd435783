#include "sbmase/bounds_lab.hpp"

#include <cmath>
#include <limits>

#include "sbmase/error.hpp"
#include "sbmase/inference.hpp"
#include "sbmase/linalg.hpp"

namespace sbmase {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr int kGramMinNodes = 25;
constexpr double kBoundConstant = 2.0 * 2.0 * 2.0 * 3.0 * 3.0 * 6.0;  // 432

void check_pair(const Graph& g, const EdgeProbMatrix& Q) {
  if (Q.n() != g.n()) throw PreconditionError("graph and Q differ in size");
}

double gram_gap(const Graph& g, const EdgeProbMatrix& Q) {
  const MatrixXd& A = g.adjacency();
  const MatrixXd& q = Q.matrix();
  return (A * A.transpose() - q * q.transpose()).norm();
}

// sigma_i for i = 1..count (1-based in the math, 0-based here), zero-padded.
VectorXd leading_singular_values(const MatrixXd& m, int count) {
  const VectorXd s = singular_values(m);
  VectorXd out = VectorXd::Zero(count);
  const auto take = std::min<Eigen::Index>(count, s.size());
  out.head(take) = s.head(take);
  return out;
}

double power_product(const ModelConstants& c, double ag_exponent) {
  return std::pow(c.alpha, ag_exponent) * c.beta * c.beta * std::pow(c.gamma, ag_exponent);
}

}  // namespace

BoundReport make_report(std::string name, double lhs, double rhs, Relation relation,
                        bool vacuous, BoundContext context) {
  BoundReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.relation = relation;
  r.holds = relation == Relation::AtMost ? lhs <= rhs : lhs >= rhs;
  r.vacuous = vacuous;
  r.context = std::move(context);
  return r;
}

double gram_concentration_rhs(int n) {
  const double nn = n;
  return std::sqrt(3.0) * std::pow(nn, 1.5) * std::sqrt(std::log(nn));
}

BoundReport check_gram_concentration(const Graph& g, const EdgeProbMatrix& Q) {
  check_pair(g, Q);
  if (g.n() < kGramMinNodes) {
    throw PreconditionError("check_gram_concentration requires n >= 25");
  }
  const double n = g.n();
  const double rhs = gram_concentration_rhs(g.n());
  return make_report("gram_concentration", gram_gap(g, Q), rhs, Relation::AtMost, rhs >= n * n,
                     BoundContext{g.n(), 0, {}});
}

std::vector<BoundReport> check_sigma_bounds(const Graph& g, const EdgeProbMatrix& Q,
                                            const ModelConstants& consts, int d) {
  check_pair(g, Q);
  if (d < 1 || d > g.n()) throw PreconditionError("check_sigma_bounds: d outside [1, n]");
  const int n = g.n();
  const VectorXd sa = leading_singular_values(g.adjacency(), d + 1);
  const VectorXd sq = leading_singular_values(Q.matrix(), d);
  const double floor = consts.alpha * consts.gamma * n;
  const double threshold = rank_threshold(n);
  const BoundContext ctx{n, 0, {}};
  return {
      make_report("sigma1_A", sa(0), n, Relation::AtMost, false, ctx),
      make_report("sigma_d_A", sa(d - 1), floor, Relation::AtLeast, floor <= 0.0, ctx),
      make_report("sigma_d+1_A", sa(d), threshold, Relation::AtMost, threshold >= n, ctx),
      make_report("sigma_d_Q", sq(d - 1), floor, Relation::AtLeast, floor <= 0.0, ctx),
  };
}

BoundReport check_row_gaps(const Embedding& emb_Q, const std::vector<int>& tau,
                           const ModelConstants& consts) {
  const int n = emb_Q.n();
  if (static_cast<int>(tau.size()) != n) throw PreconditionError("tau must have length n");
  const double rhs = consts.beta_defined
                         ? consts.beta * std::sqrt(consts.alpha * consts.gamma) / std::sqrt(n)
                         : 0.0;
  const MatrixXd W = emb_Q.W_tilde();
  double gap = std::numeric_limits<double>::infinity();
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (tau[static_cast<std::size_t>(u)] == tau[static_cast<std::size_t>(v)]) continue;
      gap = std::min(gap, (W.row(u) - W.row(v)).norm());
    }
  }
  // No cross-block pair: the statement is vacuously true.
  return make_report("row_gap", gap, rhs, Relation::AtLeast, !consts.beta_defined,
                     BoundContext{n, 0, {}});
}

std::vector<BoundReport> check_weyl(const Graph& g, const EdgeProbMatrix& Q, int d) {
  check_pair(g, Q);
  const int count = std::min(d + 1, g.n());
  const VectorXd sa = leading_singular_values(g.adjacency(), count);
  const VectorXd sq = leading_singular_values(Q.matrix(), count);
  const double rhs = gram_gap(g, Q);
  std::vector<BoundReport> out;
  for (int i = 0; i < count; ++i) {
    out.push_back(make_report("weyl_" + std::to_string(i + 1),
                              std::abs(sa(i) * sa(i) - sq(i) * sq(i)), rhs, Relation::AtMost,
                              false, BoundContext{g.n(), 0, {}}));
  }
  return out;
}

BoundReport check_davis_kahan(const Graph& g, const EdgeProbMatrix& Q, int d) {
  check_pair(g, Q);
  const Embedding from_a = embed_adjacency(g, d);
  const Embedding from_q = embed_matrix(Q, d);
  const double sigma_d = from_q.sigma(d - 1);
  const double gap = sigma_d * sigma_d;
  const double rhs = gap > 0.0 ? std::sqrt(2.0) * gram_gap(g, Q) / gap
                               : std::numeric_limits<double>::infinity();
  const double residual = procrustes_align(from_q.U_tilde, from_a.U_tilde).residual;
  const double largest_residual = 2.0 * std::sqrt(static_cast<double>(d));
  return make_report("davis_kahan", residual, rhs, Relation::AtMost, rhs >= largest_residual,
                     BoundContext{g.n(), 0, {}});
}

double misclassification_bound(const ModelConstants& consts, double n, bool undirected) {
  if (n < 2) throw PreconditionError("misclassification_bound requires n >= 2");
  const double constant = undirected ? kBoundConstant / 2.0 : kBoundConstant;
  return constant / power_product(consts, 5.0) * std::log(n);
}

double misclassification_bound_scaled(const ModelConstants& consts, double n, bool undirected) {
  if (n < 2) throw PreconditionError("misclassification_bound_scaled requires n >= 2");
  const double constant = undirected ? kBoundConstant / 2.0 : kBoundConstant;
  return constant / power_product(consts, 6.0) * std::log(n);
}

BoundReport check_misclassification(std::string name, int errors, double bound, int n) {
  return make_report(std::move(name), errors, bound, Relation::AtMost, bound >= n,
                     BoundContext{n, 0, {}});
}

}  // namespace sbmase
