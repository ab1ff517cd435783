#pragma once

// File formats: model JSON, edge lists, node labels, and the CSV/JSON
// artifacts written by the command-line tools.

#include <Eigen/Dense>
#include <filesystem>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "sbmase/bounds_lab.hpp"
#include "sbmase/clustering.hpp"
#include "sbmase/inference.hpp"
#include "sbmase/sbm_core.hpp"
#include "sbmase/spectral.hpp"

namespace sbmase {

namespace fs = std::filesystem;

// Shortest decimal string that round-trips to the same double.
std::string format_double(double x);

// {"P": [[...]], "rho": [...], "directed": bool}; "rank" is optional.
BlockModel model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const BlockModel& model);
BlockModel load_model(const fs::path& path);

// 16 hex digits identifying P, rho and the directed flag.
std::string model_hash(const BlockModel& model);

nlohmann::json read_json(const fs::path& path);
void write_json(const fs::path& path, const nlohmann::json& j);

// One "u v" pair per line, 0-based. Blank lines and lines starting with '#'
// are skipped; repeated edges are harmless.
Graph parse_edge_list(std::istream& in, int n, bool directed);
Graph load_edge_list(const fs::path& path, int n, bool directed);
// Sorted unique pairs, u < v when undirected, no header.
std::string format_edge_list(const Graph& g);
void save_edge_list(const Graph& g, const fs::path& path);

struct NodeLabels {
  std::vector<std::string> labels;       // length n
  std::vector<std::string> label_names;  // distinct, first-appearance order
  // labels[u] as an index into label_names.
  [[nodiscard]] std::vector<int> codes() const;
};

struct LabeledGraph {
  Graph graph;
  NodeLabels labels;
};

// One "node_id label" pair per line, every node exactly once.
NodeLabels parse_labels(std::istream& in, int n);
NodeLabels load_labels(const fs::path& path, int n);
void save_labels(const std::vector<int>& tau, const fs::path& path);

// "node,coord_1,...,coord_m" with one row per node.
void write_coordinates_csv(const Eigen::MatrixXd& coords, const fs::path& path);
Eigen::MatrixXd read_coordinates_csv(const fs::path& path);

// "node,label".
void write_clustering_csv(const std::vector<int>& tau_hat, const fs::path& path);
std::vector<int> read_clustering_csv(const fs::path& path);
nlohmann::json clustering_summary(const Clustering& c);

nlohmann::json estimation_to_json(const EstimationReport& r);

// Appends "name,n,K,error_count,error_rate,ari" to run_summary.csv, writing
// the header when the file is new.
void append_run_summary(const fs::path& path, const std::string& name, int n, int K,
                        const MisclassificationResult& m, const AriResult& ari);

// "bound,n,seed,lhs,rhs,holds".
void write_bounds_csv(const std::vector<BoundReport>& reports, const fs::path& path);

}  // namespace sbmase
