#pragma once

// Theoretical bounds as formulas, and their empirical left-hand sides.
//
// All logarithms are natural. Bounds that say "almost always" are evaluated
// on a single graph; the harness turns them into pass frequencies over seeds.

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "sbmase/sbm_core.hpp"
#include "sbmase/spectral.hpp"

namespace sbmase {

enum class Relation { AtMost, AtLeast };

struct BoundContext {
  int n = 0;
  std::uint64_t seed = 0;
  std::string model_hash;
};

struct BoundReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  Relation relation = Relation::AtMost;
  bool holds = false;
  // The bound carries no information at this n (e.g. a misclassification
  // bound >= n, or a residual bound above the largest possible residual).
  bool vacuous = false;
  BoundContext context;
};

BoundReport make_report(std::string name, double lhs, double rhs, Relation relation,
                        bool vacuous = false, BoundContext context = {});

// || A A^T - Q Q^T ||_F <= sqrt(3) n^{3/2} sqrt(ln n), n >= 25.
double gram_concentration_rhs(int n);
BoundReport check_gram_concentration(const Graph& g, const EdgeProbMatrix& Q);

// sigma_1(A) <= n; sigma_d(A) >= alpha gamma n; sigma_{d+1}(A) <= rank
// threshold; sigma_d(Q) >= alpha gamma n.
std::vector<BoundReport> check_sigma_bounds(const Graph& g, const EdgeProbMatrix& Q,
                                            const ModelConstants& consts, int d);

// min over cross-block pairs of || W_u - W_v || >= beta sqrt(alpha gamma) / sqrt(n), with
// W = [U | V] from the embedding of the noiseless Q.
BoundReport check_row_gaps(const Embedding& emb_Q, const std::vector<int>& tau,
                           const ModelConstants& consts);

// | sigma_i^2(A) - sigma_i^2(Q) | <= || A A^T - Q Q^T ||_F for i = 1..d+1.
std::vector<BoundReport> check_weyl(const Graph& g, const EdgeProbMatrix& Q, int d);

// Procrustes residual between U (from Q) and U_tilde (from A) is at most
// sqrt(2) || A A^T - Q Q^T ||_F / lambda_d(Q Q^T).
BoundReport check_davis_kahan(const Graph& g, const EdgeProbMatrix& Q, int d);

// 432 / (alpha^5 beta^2 gamma^5) ln n, or 216 / (...) when undirected. n >= 2;
// real-valued so the formula can be evaluated at any point.
double misclassification_bound(const ModelConstants& consts, double n, bool undirected);
// 432 / (alpha^6 beta^2 gamma^6) ln n; halved when undirected.
double misclassification_bound_scaled(const ModelConstants& consts, double n, bool undirected = false);

// Observed misclassification count against one of the two bounds above; the
// report is vacuous when the bound is at least n.
BoundReport check_misclassification(std::string name, int errors, double bound, int n);

}  // namespace sbmase
