// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance            run everything
//   acceptance 3 6 8      run the listed criteria only
//
// Exit status is nonzero if any selected criterion fails.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "sbmase/bounds_lab.hpp"
#include "sbmase/clustering.hpp"
#include "sbmase/experiment.hpp"
#include "sbmase/inference.hpp"
#include "sbmase/io.hpp"
#include "sbmase/rng.hpp"
#include "sbmase/sbm_core.hpp"
#include "sbmase/spectral.hpp"

namespace {

using namespace sbmase;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr std::uint64_t kBaseSeed = 1;

struct Outcome {
  bool pass = false;
  std::string detail;
};

BlockModel simulation_model() {
  MatrixXd P(2, 2);
  P << 0.42, 0.42, 0.42, 0.5;
  VectorXd rho(2);
  rho << 0.6, 0.4;
  return BlockModel::make(P, rho, false);
}

std::string fmt(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string count(int k, int of) { return std::to_string(k) + "/" + std::to_string(of); }

struct Sampled {
  BlockAssignment tau;
  Graph graph;
};

Sampled draw(const BlockModel& m, int n, std::uint64_t seed, TauMode mode = TauMode::Exact) {
  BlockAssignment tau = sample_tau(m, n, mode, seed);
  Graph g = sample_graph(m, tau, seed);
  return Sampled{std::move(tau), std::move(g)};
}

// Shared by criteria 1 and 2: scaled adjacency and scaled Laplacian over the
// union of both grids, 20 paired replicates per n.
const McResults& simulation_study() {
  static const McResults results = [] {
    ExperimentConfig cfg(simulation_model());
    cfg.n_grid = {500, 1000, 1400, 1500, 1700, 2000};
    cfg.replicates = 20;
    cfg.seed = kBaseSeed;
    cfg.variants = {Pipeline::ScaledAdjacency, Pipeline::ScaledLaplacian};
    cfg.tau_mode = TauMode::Exact;
    return run_mc_experiment(cfg);
  }();
  return results;
}

Outcome convergence_trend() {
  const McResults& r = simulation_study();
  if (!r.failures.empty()) return {false, std::to_string(r.failures.size()) + " replicate failures"};
  std::map<int, double> mean;
  for (const auto& s : r.summary) {
    if (s.variant == Pipeline::ScaledAdjacency) mean[s.n] = s.mean_error_rate;
  }
  const std::vector<int> grid{500, 1000, 1500, 2000};
  bool monotone = true;
  std::string detail = "mean error";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    detail += " n=" + std::to_string(grid[i]) + ":" + fmt(mean[grid[i]]);
    if (i > 0 && mean[grid[i]] > mean[grid[i - 1]]) monotone = false;
  }
  const bool small_at_end = mean[2000] <= 0.05;
  detail += monotone ? "; nonincreasing" : "; NOT nonincreasing";
  detail += small_at_end ? "; <= 0.05 at n=2000" : "; > 0.05 at n=2000";
  return {monotone && small_at_end, detail};
}

Outcome adjacency_dominates_laplacian() {
  const McResults& r = simulation_study();
  std::map<std::tuple<int, int, Pipeline>, int> errors;
  for (const auto& row : r.rows) errors[{row.n, row.replicate, row.variant}] = row.error_count;
  int wins = 0;
  int pairs = 0;
  std::string detail;
  for (int n : {1400, 1700, 2000}) {
    int local = 0;
    for (int rep = 0; rep < 20; ++rep) {
      const auto a = errors.find({n, rep, Pipeline::ScaledAdjacency});
      const auto l = errors.find({n, rep, Pipeline::ScaledLaplacian});
      if (a == errors.end() || l == errors.end()) continue;
      ++pairs;
      if (a->second <= l->second) {
        ++wins;
        ++local;
      }
    }
    detail += " n=" + std::to_string(n) + ":" + count(local, 20);
  }
  const bool pass = pairs == 60 && wins * 10 >= pairs * 9;
  return {pass, "adjacency <= laplacian in " + count(wins, pairs) + " pairs (need >= 90%);" + detail};
}

Outcome gram_concentration() {
  const BlockModel m = simulation_model();
  int holds = 0;
  double worst = 0.0;
  double rhs = 0.0;
  for (int s = 0; s < 200; ++s) {
    const Sampled d = draw(m, 200, replicate_seed(kBaseSeed, 200, s));
    const BoundReport r = check_gram_concentration(d.graph, EdgeProbMatrix(edge_probability_matrix(m, d.tau)));
    holds += r.holds ? 1 : 0;
    worst = std::max(worst, r.lhs);
    rhs = r.rhs;
  }
  return {holds == 200, count(holds, 200) + " runs; max lhs " + fmt(worst, 1) + " vs rhs " + fmt(rhs, 1)};
}

Outcome singular_value_bounds() {
  const BlockModel m = simulation_model();
  const ModelConstants c = compute_constants(m, factorize_p(m));
  int top = 0, tail = 0, floor = 0;
  double min_s2 = 1e300, max_s3 = 0.0;
  const int runs = 50;
  for (int s = 0; s < runs; ++s) {
    const Sampled d = draw(m, 2000, replicate_seed(kBaseSeed, 2000, s));
    const auto r = check_sigma_bounds(d.graph, EdgeProbMatrix(edge_probability_matrix(m, d.tau)), c, 2);
    top += r[0].holds ? 1 : 0;
    floor += r[1].holds ? 1 : 0;
    tail += r[2].holds ? 1 : 0;
    min_s2 = std::min(min_s2, r[1].lhs);
    max_s3 = std::max(max_s3, r[2].lhs);
  }
  const double threshold = rank_threshold(2000);
  const bool pass = top == runs && tail == runs && floor >= 49;
  return {pass, "sigma1<=n " + count(top, runs) + "; sigma3<=" + fmt(threshold, 1) + " " + count(tail, runs) +
                    " (max " + fmt(max_s3, 1) + "); sigma2>=" + fmt(c.alpha * c.gamma * 2000, 2) + " " +
                    count(floor, runs) + " (min " + fmt(min_s2, 1) + ")"};
}

Outcome davis_kahan() {
  const BlockModel m = simulation_model();
  int holds = 0, vacuous = 0;
  double worst_ratio = 0.0;
  for (int s = 0; s < 50; ++s) {
    const Sampled d = draw(m, 500, replicate_seed(kBaseSeed, 500, s));
    const BoundReport r = check_davis_kahan(d.graph, EdgeProbMatrix(edge_probability_matrix(m, d.tau)), 2);
    holds += r.holds ? 1 : 0;
    vacuous += r.vacuous ? 1 : 0;
    worst_ratio = std::max(worst_ratio, r.lhs / r.rhs);
  }
  return {holds == 50, count(holds, 50) + " runs; max residual/bound " + fmt(worst_ratio, 3) + "; vacuous in " +
                           std::to_string(vacuous)};
}

// Independent check of an optimal clustering: centroids are the per-cluster
// means and the objective is the within-cluster sum of squares.
bool centroids_are_means(const MatrixXd& Z, const Clustering& c, int K) {
  double total = 0.0;
  for (int k = 0; k < K; ++k) {
    Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(Z.cols());
    double sq = 0.0;
    int members = 0;
    for (Eigen::Index u = 0; u < Z.rows(); ++u) {
      if (c.tau_hat[static_cast<std::size_t>(u)] != k) continue;
      sum += Z.row(u);
      sq += Z.row(u).squaredNorm();
      ++members;
    }
    if (members == 0) continue;
    if ((c.centroids.row(k) - sum / members).cwiseAbs().maxCoeff() > 1e-9) return false;
    total += sq - sum.squaredNorm() / members;
  }
  return std::abs(total - c.objective) <= 1e-9;
}

Outcome clustering_oracle() {
  std::mt19937_64 gen(kBaseSeed);
  std::normal_distribution<double> normal;
  int matches = 0;
  int valid = 0;
  for (int instance = 0; instance < 100; ++instance) {
    MatrixXd Z(9, 2);
    for (Eigen::Index i = 0; i < Z.size(); ++i) Z.data()[i] = normal(gen);
    const Clustering exact = cluster_exact(Z, 2);
    const Clustering approx = cluster_mse(Z, 2, KMeansOptions{}, derive_seed(kBaseSeed, {kClusterStream,
                                                                             static_cast<std::uint64_t>(instance)}));
    matches += std::abs(exact.objective - approx.objective) <= 1e-9 ? 1 : 0;
    valid += centroids_are_means(Z, exact, 2) ? 1 : 0;
  }
  return {matches >= 95 && valid == 100,
          "objective match " + count(matches, 100) + " (need >= 95); exact centroids = means " + count(valid, 100)};
}

Outcome estimator_consistency() {
  const BlockModel m = simulation_model();
  int ok = 0;
  double worst_p = 0.0, worst_rho = 0.0;
  for (int s = 0; s < 100; ++s) {
    const Sampled d = draw(m, 2000, replicate_seed(kBaseSeed + 7, 2000, s), TauMode::Multinomial);
    const EstimationReport r = estimate_params(d.graph, d.tau.tau, 2, 2);
    const double dp = (r.P_hat - m.P()).cwiseAbs().maxCoeff();
    const double dr = (r.rho_hat - m.rho()).cwiseAbs().maxCoeff();
    worst_p = std::max(worst_p, dp);
    worst_rho = std::max(worst_rho, dr);
    ok += (dp <= 0.02 && dr <= 0.03) ? 1 : 0;
  }
  return {ok >= 95, count(ok, 100) + " seeds within tolerance; max |P_hat-P| " + fmt(worst_p, 4) +
                        ", max |rho_hat-rho| " + fmt(worst_rho, 4)};
}

Outcome exact_values() {
  const ModelConstants unit{1.0, 1.0, 1.0, true};
  const double e = std::numbers::e;
  std::vector<std::string> failed;
  const auto expect = [&](bool ok, const std::string& what) {
    if (!ok) failed.push_back(what);
  };
  expect(std::abs(misclassification_bound(unit, e, false) - 432.0) <= 1e-12, "directed bound");
  expect(std::abs(misclassification_bound(unit, e, true) - 216.0) <= 1e-12, "undirected bound");
  expect(std::abs(misclassification_bound_scaled(unit, e) - 432.0) <= 1e-12, "scaled bound");
  expect(std::abs(misclassification_bound_scaled({0.5, 1.0, 1.0, true}, e) - 27648.0) <= 1e-9, "scaled bound alpha=0.5");
  const std::vector<int> tau{0, 0, 1, 1};
  const auto same = misclassification(tau, tau, 2);
  expect(same.errors == 0 && same.best_perm == std::vector<int>{0, 1}, "misclassification identity");
  expect(misclassification(tau, {1, 1, 0, 0}, 2).errors == 0, "misclassification swap");
  expect(misclassification(tau, {0, 1, 0, 1}, 2).errors == 2, "misclassification mixed");
  expect(adjusted_rand_index(tau, tau).value == 1.0, "ARI identical");
  expect(std::abs(adjusted_rand_index(tau, {0, 1, 0, 1}).value + 0.5) <= 1e-15, "ARI -0.5");
  expect(adjusted_rand_index(tau, {1, 1, 0, 0}).value == 1.0, "ARI relabeled");
  std::string detail = failed.empty() ? "10 exact values reproduced" : "failed:";
  for (const auto& f : failed) detail += " " + f;
  return {failed.empty(), detail};
}

Outcome planted_one_vs_all() {
  MatrixXd P(2, 2);
  P << 0.9, 0.05, 0.05, 0.9;
  const BlockModel m = BlockModel::make(P, VectorXd::Constant(2, 0.5), false);
  int ok = 0;
  for (int s = 0; s < 100; ++s) {
    const std::uint64_t seed = replicate_seed(kBaseSeed, 400, s);
    const Sampled d = draw(m, 400, seed);
    NodeLabels labels;
    for (int t : d.tau.tau) labels.labels.push_back(t == 0 ? "planted" : "rest");
    labels.label_names = {labels.labels[0]};
    labels.label_names.push_back(labels.labels[0] == "planted" ? "rest" : "planted");
    const auto rows = run_one_vs_all(LabeledGraph{d.graph, labels}, Pipeline::ScaledAdjacency, 2, seed);
    for (const auto& row : rows) {
      if (row.category == "planted" && row.error_count == 0 && std::abs(row.ari - 1.0) <= 1e-12) ++ok;
    }
  }
  return {ok >= 95, "planted category error 0 and ARI 1 in " + count(ok, 100) + " seeds (need >= 95)"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cli_determinism() {
  const fs::path out = fs::temp_directory_path() / "sbmase_acceptance_determinism";
  fs::remove_all(out);
  const std::string base = std::string("\"") + SBMASE_CLI_PATH + "\" --config \"" + SBMASE_TEST_DATA_DIR +
                           "/mc_small.json\" --seed 4242 --out ";
  for (const char* run : {"a", "b"}) {
    const std::string cmd = base + "\"" + (out / run).string() + "\" mc-sim > /dev/null";
    if (std::system(cmd.c_str()) != 0) return {false, "mc-sim exited with an error"};
  }
  bool same = true;
  std::string detail;
  for (const char* file : {"mc_results.csv", "mc_summary.csv", "mc_failures.csv"}) {
    const std::string a = slurp(out / "a" / file);
    const std::string b = slurp(out / "b" / file);
    const bool eq = !a.empty() && a == b;
    same = same && eq;
    detail += std::string(" ") + file + (eq ? " identical" : " DIFFERS");
  }
  return {same, "two runs:" + detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"simulation convergence trend", convergence_trend},
      {"adjacency vs Laplacian dominance", adjacency_dominates_laplacian},
      {"Gram matrix concentration", gram_concentration},
      {"singular value bounds", singular_value_bounds},
      {"Davis-Kahan residual", davis_kahan},
      {"clustering oracle equivalence", clustering_oracle},
      {"estimator consistency", estimator_consistency},
      {"exact-value suite", exact_values},
      {"planted one-vs-all", planted_one_vs_all},
      {"mc-sim determinism", cli_determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << id << "] " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
