#include <doctest.h>

#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "sbmase/error.hpp"
#include "sbmase/experiment.hpp"

using namespace sbmase;
using Eigen::MatrixXd;

namespace {

const fs::path kData = SBMASE_TEST_DATA_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "sbmase_experiment_tests";
  fs::create_directories(dir);
  return dir / name;
}

ExperimentConfig small_config() {
  ExperimentConfig cfg(testing::simulation_model());
  cfg.n_grid = {100};
  cfg.replicates = 1;
  cfg.seed = 5;
  return cfg;
}

LabeledGraph planted(int n, std::uint64_t seed) {
  MatrixXd P(2, 2);
  P << 0.9, 0.05, 0.05, 0.9;
  const BlockModel m = BlockModel::make(P, Eigen::VectorXd::Constant(2, 0.5), false);
  const BlockAssignment tau = sample_tau(m, n, TauMode::Exact, seed);
  NodeLabels labels;
  labels.label_names = {"left", "right"};
  for (int t : tau.tau) labels.labels.push_back(labels.label_names[static_cast<std::size_t>(t)]);
  if (labels.labels[0] == "right") std::swap(labels.label_names[0], labels.label_names[1]);
  return LabeledGraph{sample_graph(m, tau, seed), labels};
}

}  // namespace

TEST_CASE("config validation") {
  ExperimentConfig cfg = small_config();
  CHECK_NOTHROW(cfg.validate());
  cfg.n_grid = {};
  CHECK_THROWS_AS(cfg.validate(), PreconditionError);
  cfg.n_grid = {200, 100};
  CHECK_THROWS_AS(cfg.validate(), PreconditionError);
  cfg.n_grid = {100};
  cfg.replicates = 0;
  CHECK_THROWS_AS(cfg.validate(), PreconditionError);
}

TEST_CASE("config JSON") {
  const ExperimentConfig cfg = load_config(kData / "mc_small.json");
  CHECK(cfg.n_grid == std::vector<int>{100, 150});
  CHECK(cfg.replicates == 2);
  CHECK(cfg.variants.size() == 4);
  CHECK(cfg.tau_mode == TauMode::Exact);
  CHECK(cfg.dimension() == 2);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"model": {"P": [[0.5]], "rho": [1]}, "n_grid": [10],
                                                             "variants": ["spectral"]})")),
                  ParseError);
  CHECK(parse_pipeline("unscaled_laplacian") == Pipeline::UnscaledLaplacian);
}

TEST_CASE("one replicate, one pipeline gives one row") {
  const McResults r = run_mc_experiment(small_config());
  REQUIRE(r.rows.size() == 1);
  CHECK(r.failures.empty());
  CHECK(r.rows[0].n == 100);
  CHECK(r.rows[0].variant == Pipeline::ScaledAdjacency);
  CHECK(r.summary.size() == 1);
  CHECK(r.rows[0].error_rate <= 0.5);
}

TEST_CASE("results are identical across thread counts and reruns") {
  ExperimentConfig cfg = load_config(kData / "mc_small.json");
  cfg.threads = 1;
  const McResults one = run_mc_experiment(cfg);
  cfg.threads = 3;
  const McResults three = run_mc_experiment(cfg);
  const fs::path a = scratch("a.csv");
  const fs::path b = scratch("b.csv");
  write_mc_results_csv(one, a);
  write_mc_results_csv(three, b);
  CHECK(slurp(a) == slurp(b));
  CHECK(one.rows.size() == 2 * 2 * 4);
  // Rows are ordered by (n, replicate, variant).
  CHECK(one.rows[0].n == 100);
  CHECK(one.rows[4].replicate == 1);
  CHECK(one.rows.back().n == 150);
  CHECK(slurp(a).rfind(slurp(kData / "mc_results.header"), 0) == 0);
}

TEST_CASE("extending the grid leaves existing cells unchanged") {
  ExperimentConfig cfg = small_config();
  const McResults base = run_mc_experiment(cfg);
  cfg.n_grid = {100, 120};
  cfg.replicates = 2;
  const McResults more = run_mc_experiment(cfg);
  CHECK(more.rows[0].error_count == base.rows[0].error_count);
}

TEST_CASE("replicate failures are recorded, not thrown") {
  ExperimentConfig cfg(BlockModel::make(MatrixXd::Constant(2, 2, 0.01), Eigen::VectorXd::Constant(2, 0.5), false, 1));
  cfg.n_grid = {30};
  cfg.variants = {Pipeline::ScaledLaplacian};
  cfg.d = 1;
  const McResults r = run_mc_experiment(cfg);
  // At density 0.01 and n = 30 some node is isolated with near certainty.
  CHECK(r.rows.empty());
  REQUIRE(r.failures.size() == 1);
  CHECK(r.summary[0].failed == 1);
  const fs::path out = scratch("failures.csv");
  write_mc_failures_csv(r, out);
  CHECK(slurp(out).rfind("n,replicate,variant,message\n30,0,scaled_laplacian,", 0) == 0);
}

TEST_CASE("one-vs-all") {
  SUBCASE("planted two-block graph") {
    const LabeledGraph lg = planted(400, 2);
    const auto rows = run_one_vs_all(lg, Pipeline::ScaledAdjacency, 2, 2);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].error_count == 0);
    CHECK(rows[0].ari == doctest::Approx(1.0));
    CHECK(rows[0].size + rows[1].size == 400);
  }
  SUBCASE("single category") {
    LabeledGraph lg = planted(40, 1);
    lg.labels.label_names = {"only"};
    lg.labels.labels.assign(40, "only");
    CHECK_THROWS_AS(run_one_vs_all(lg, Pipeline::ScaledAdjacency, 2, 1), PreconditionError);
  }
}

TEST_CASE("bound verification") {
  SUBCASE("simulation model") {
    ExperimentConfig cfg = small_config();
    cfg.n_grid = {60};
    cfg.replicates = 3;
    const auto reports = run_bound_verification(cfg);
    const auto tally = tally_bounds(reports);
    bool saw_gram = false;
    for (const auto& t : tally) {
      CHECK(t.runs == 3);
      if (t.name == "gram_concentration") {
        saw_gram = true;
        CHECK(t.holds == 3);
      }
    }
    CHECK(saw_gram);
    CHECK(reports[0].context.seed == replicate_seed(cfg.seed, 60, 0));
    CHECK(reports[0].context.model_hash == model_hash(cfg.model));
  }
  SUBCASE("too small") {
    ExperimentConfig cfg = small_config();
    cfg.n_grid = {10};
    CHECK_THROWS_AS(run_bound_verification(cfg), PreconditionError);
  }
  SUBCASE("empty model") {
    ExperimentConfig cfg(BlockModel::make(MatrixXd::Zero(2, 2), Eigen::VectorXd::Constant(2, 0.5), false));
    cfg.n_grid = {25, 30};
    const auto reports = run_bound_verification(cfg);
    REQUIRE_FALSE(reports.empty());
    for (const auto& r : reports) {
      CHECK(r.lhs == 0.0);
      CHECK(r.holds);
    }
  }
}
