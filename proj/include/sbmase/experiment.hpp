#pragma once

// Monte-Carlo misclassification study, one-vs-all evaluation on labeled
// graphs, and batch bound verification.
//
// Seeding: replicate r at size n draws its labels and graph from
// derive_seed(seed, {kReplicateStream, n, r}); every pipeline sees that same
// graph. K-means for pipeline p uses derive_seed(seed, {kReplicateStream, n,
// r, 1 + index of p}). Adding grid points, replicates or pipelines never
// changes existing cells.

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "sbmase/bounds_lab.hpp"
#include "sbmase/io.hpp"
#include "sbmase/sbm_core.hpp"

namespace sbmase {

enum class Pipeline { ScaledAdjacency, UnscaledAdjacency, ScaledLaplacian, UnscaledLaplacian };

// "scaled_adjacency", "unscaled_adjacency", "scaled_laplacian", "unscaled_laplacian".
std::string pipeline_name(Pipeline p);
Pipeline parse_pipeline(const std::string& name);

struct ExperimentConfig {
  explicit ExperimentConfig(BlockModel m) : model(std::move(m)) {}

  BlockModel model;
  std::vector<int> n_grid;
  int replicates = 1;
  std::uint64_t seed = 0;
  std::vector<Pipeline> variants{Pipeline::ScaledAdjacency};
  TauMode tau_mode = TauMode::Exact;
  bool diagonal_augment = false;
  double edge_keep_prob = 1.0;
  // Embedding dimension; defaults to the rank of P.
  std::optional<int> d;
  int threads = 1;

  [[nodiscard]] int dimension() const { return d.value_or(model.rank()); }
  // n_grid nonempty and strictly ascending, replicates >= 1, keep in (0, 1].
  void validate() const;
};

// Keys mirror the fields: "model" (object or path string resolved against
// base_dir), "n_grid", "replicates", "seed", "variants", "tau_mode",
// "diagonal_augment", "edge_keep_prob", "d", "threads".
ExperimentConfig config_from_json(const nlohmann::json& j, const fs::path& base_dir = {});
ExperimentConfig load_config(const fs::path& path);

std::uint64_t replicate_seed(std::uint64_t seed, int n, int replicate);
std::uint64_t cluster_seed(std::uint64_t seed, int n, int replicate, Pipeline p);

struct McRow {
  int n = 0;
  int replicate = 0;
  Pipeline variant = Pipeline::ScaledAdjacency;
  int error_count = 0;
  double error_rate = 0.0;
  double runtime_ms = 0.0;
};

struct McFailure {
  int n = 0;
  int replicate = 0;
  Pipeline variant = Pipeline::ScaledAdjacency;
  std::string message;
};

struct McSummaryRow {
  int n = 0;
  Pipeline variant = Pipeline::ScaledAdjacency;
  int completed = 0;
  int failed = 0;
  double mean_error_count = 0.0;
  double mean_error_rate = 0.0;
};

struct McResults {
  std::vector<McRow> rows;          // ordered by (n, replicate, variant)
  std::vector<McFailure> failures;  // same order
  std::vector<McSummaryRow> summary;
};

// Errors inside a replicate are recorded in failures rather than thrown.
McResults run_mc_experiment(const ExperimentConfig& cfg);

// "n,replicate,variant,error_count,error_rate,runtime_ms". runtime_ms is
// written as 0 unless with_timing, so reruns are byte-identical.
void write_mc_results_csv(const McResults& r, const fs::path& path, bool with_timing = false);
// "n,variant,completed,failed,mean_error_count,mean_error_rate".
void write_mc_summary_csv(const McResults& r, const fs::path& path);
// "n,replicate,variant,message".
void write_mc_failures_csv(const McResults& r, const fs::path& path);

struct OneVsAllRow {
  std::string category;
  int size = 0;
  int error_count = 0;
  double error_rate = 0.0;
  double ari = 0.0;
};

// Embeds once with dimension d, clusters into K = 2, then scores the
// clustering against each category-versus-rest split.
std::vector<OneVsAllRow> run_one_vs_all(const LabeledGraph& lg, Pipeline variant, int d,
                                        std::uint64_t seed);
// "category,size,error_count,error_rate,ari".
void write_one_vs_all_csv(const std::vector<OneVsAllRow>& rows, const fs::path& path);

// For every (n, replicate): the Gram-gap, singular value, row gap, Weyl and
// Davis-Kahan checks, plus the observed misclassification count of the
// concatenated (or, undirected, left) embedding against the misclassification
// bound. Models of rank 0 get the Gram-gap and sigma_1 checks only.
// Requires every n >= 25.
std::vector<BoundReport> run_bound_verification(const ExperimentConfig& cfg);

struct BoundTally {
  std::string name;
  int n = 0;
  int runs = 0;
  int holds = 0;
  int vacuous = 0;
};
std::vector<BoundTally> tally_bounds(const std::vector<BoundReport>& reports);
// "bound,n,runs,holds,vacuous".
void write_bound_tally_csv(const std::vector<BoundTally>& tally, const fs::path& path);

}  // namespace sbmase
