// Command-line front end: sampling, embedding, clustering, estimation and the
// experiment drivers.

#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "sbmase/clustering.hpp"
#include "sbmase/error.hpp"
#include "sbmase/experiment.hpp"
#include "sbmase/inference.hpp"
#include "sbmase/io.hpp"
#include "sbmase/spectral.hpp"

namespace {

using namespace sbmase;
using nlohmann::json;

struct Globals {
  std::uint64_t seed = 0;
  std::string config;
  std::string out = ".";
};

struct GraphArgs {
  std::string path;
  int n = 0;
  bool directed = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--graph", path, "Edge list, one 'u v' pair per line")->required()->check(CLI::ExistingFile);
    cmd->add_option("--n", n, "Node count")->required()->check(CLI::PositiveNumber);
    cmd->add_flag("--directed", directed, "Treat edges as ordered pairs");
  }
  [[nodiscard]] Graph load() const { return load_edge_list(path, n, directed); }
};

// Given d, or d_hat from the singular value threshold when requested.
int resolve_dimension(const Graph& g, std::optional<int> d, bool estimate, json& info) {
  if (estimate) {
    const RankEstimate r = estimate_rank(g);
    info["d_hat"] = r.d_hat;
    info["threshold"] = r.threshold;
    if (r.d_hat == 0) throw DegenerateRank("estimated rank is 0; no singular value exceeds the threshold");
    return r.d_hat;
  }
  if (!d) throw PreconditionError("pass --d or --estimate-rank");
  return *d;
}

fs::path out_file(const Globals& g, const std::string& name) { return fs::path(g.out) / name; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adjacency spectral embedding and clustering for stochastic blockmodel graphs"};
  app.require_subcommand(1);
  Globals globals;
  app.add_option("--seed", globals.seed, "Base seed");
  app.add_option("--config", globals.config, "Experiment config JSON");
  app.add_option("--out", globals.out, "Output directory");

  // sample
  auto* sample = app.add_subcommand("sample", "Draw block labels and a graph from a model");
  std::string model_path;
  int sample_n = 0;
  std::string tau_mode = "exact";
  double keep_prob = 1.0;
  sample->add_option("--model", model_path, "Model JSON (defaults to the config's model)");
  sample->add_option("--n", sample_n, "Node count")->required()->check(CLI::PositiveNumber);
  sample->add_option("--tau-mode", tau_mode, "exact or multinomial")->check(CLI::IsMember({"exact", "multinomial"}));
  sample->add_option("--keep-prob", keep_prob, "Edge observation probability")->check(CLI::Range(0.0, 1.0));

  // embed
  auto* embed = app.add_subcommand("embed", "Spectral embedding of a graph");
  GraphArgs embed_graph;
  embed_graph.attach(embed);
  std::optional<int> embed_d;
  bool embed_estimate = false;
  std::string method = "adjacency";
  bool augment = false;
  std::string coords = "scaled";
  embed->add_option("--d", embed_d, "Embedding dimension")->check(CLI::PositiveNumber);
  embed->add_flag("--estimate-rank", embed_estimate, "Use d_hat from the singular value threshold");
  embed->add_option("--method", method, "adjacency or laplacian")->check(CLI::IsMember({"adjacency", "laplacian"}));
  embed->add_flag("--augment", augment, "Replace the diagonal with deg(u) / (n - 1)");
  embed->add_option("--coords", coords, "scaled ([X|Y]) or unscaled ([U|V])")
      ->check(CLI::IsMember({"scaled", "unscaled"}));

  // cluster
  auto* cluster = app.add_subcommand("cluster", "K-means on embedded coordinates");
  std::string embedding_path;
  int cluster_K = 0;
  KMeansOptions kmeans;
  bool left_only = false;
  cluster->add_option("--embedding", embedding_path, "Coordinate CSV")->required()->check(CLI::ExistingFile);
  cluster->add_option("--K", cluster_K, "Number of clusters")->required()->check(CLI::PositiveNumber);
  cluster->add_option("--restarts", kmeans.restarts, "k-means++ restarts")->check(CLI::PositiveNumber);
  cluster->add_option("--max-iters", kmeans.max_iters, "Lloyd iterations per restart")->check(CLI::PositiveNumber);
  cluster->add_option("--tol", kmeans.tol, "Relative objective change to stop at");
  cluster->add_flag("--left", left_only, "Cluster the first half of the columns only (undirected graphs)");

  // estimate
  auto* estimate = app.add_subcommand("estimate", "Block probabilities and edge probabilities from labels");
  GraphArgs est_graph;
  est_graph.attach(estimate);
  std::string est_labels;
  std::string est_truth;
  int est_K = 0;
  std::optional<int> est_d;
  estimate->add_option("--labels", est_labels, "Clustering CSV 'node,label'")->required()->check(CLI::ExistingFile);
  estimate->add_option("--K", est_K, "Number of blocks")->required()->check(CLI::PositiveNumber);
  estimate->add_option("--d", est_d, "Rank of P-hat embedding (default K)")->check(CLI::PositiveNumber);
  estimate->add_option("--truth", est_truth, "True labels 'node label'; appends to run_summary.csv")
      ->check(CLI::ExistingFile);

  // mc-sim
  auto* mc = app.add_subcommand("mc-sim", "Monte-Carlo misclassification study (needs --config)");
  bool timing = false;
  mc->add_flag("--timing", timing, "Record wall-clock runtime_ms instead of 0");

  // one-vs-all
  auto* ova = app.add_subcommand("one-vs-all", "Score a 2-means clustering against each category");
  GraphArgs ova_graph;
  ova_graph.attach(ova);
  std::string ova_labels;
  std::optional<int> ova_d;
  bool ova_estimate = false;
  std::string ova_variant = "scaled_adjacency";
  ova->add_option("--labels", ova_labels, "Category labels 'node label'")->required()->check(CLI::ExistingFile);
  ova->add_option("--d", ova_d, "Embedding dimension")->check(CLI::PositiveNumber);
  ova->add_flag("--estimate-rank", ova_estimate, "Use d_hat from the singular value threshold");
  ova->add_option("--variant", ova_variant, "Embedding pipeline");

  // verify-bounds
  app.add_subcommand("verify-bounds", "Check the concentration and misclassification bounds (needs --config)");

  CLI11_PARSE(app, argc, argv);

  try {
    const fs::path out_dir(globals.out);
    fs::create_directories(out_dir);

    if (*sample) {
      const BlockModel model = !model_path.empty()  ? load_model(model_path)
                               : !globals.config.empty() ? load_config(globals.config).model
                                                         : throw PreconditionError("pass --model or --config");
      const TauMode mode = tau_mode == "exact" ? TauMode::Exact : TauMode::Multinomial;
      if (!(keep_prob > 0.0)) throw PreconditionError("--keep-prob must be positive");
      const BlockAssignment tau = sample_tau(model, sample_n, mode, globals.seed);
      const Graph g = sample_graph(model, tau, globals.seed, keep_prob);
      save_edge_list(g, out_file(globals, "graph.edges"));
      save_labels(tau.tau, out_file(globals, "labels.txt"));
      write_json(out_file(globals, "sample.json"), json{{"n", sample_n},
                                                        {"seed", globals.seed},
                                                        {"directed", model.directed()},
                                                        {"edges", g.edge_count()},
                                                        {"block_counts", tau.counts},
                                                        {"model", model_to_json(model)}});
    } else if (*embed) {
      const Graph g = embed_graph.load();
      json info;
      const int d = resolve_dimension(g, embed_d, embed_estimate, info);
      Embedding emb = method == "laplacian" ? embed_laplacian(g, d)
                      : augment             ? embed_matrix(augment_diagonal(g), d)
                                            : embed_adjacency(g, d);
      write_coordinates_csv(coords == "scaled" ? emb.Z_tilde() : emb.W_tilde(), out_file(globals, "embedding.csv"));
      info["d"] = d;
      info["method"] = method;
      info["coords"] = coords;
      info["sigma"] = std::vector<double>(emb.sigma.data(), emb.sigma.data() + emb.sigma.size());
      write_json(out_file(globals, "embedding.json"), info);
    } else if (*cluster) {
      Eigen::MatrixXd Z = read_coordinates_csv(embedding_path);
      if (left_only) {
        if (Z.cols() % 2 != 0) throw PreconditionError("--left needs an even number of columns");
        Z = Z.leftCols(Z.cols() / 2).eval();
      }
      const Clustering c = cluster_mse(Z, cluster_K, kmeans, globals.seed);
      write_clustering_csv(c.tau_hat, out_file(globals, "clustering.csv"));
      write_json(out_file(globals, "clustering.json"), clustering_summary(c));
    } else if (*estimate) {
      const Graph g = est_graph.load();
      const std::vector<int> tau_hat = read_clustering_csv(est_labels);
      const EstimationReport r = estimate_params(g, tau_hat, est_K, est_d.value_or(est_K));
      write_json(out_file(globals, "estimation.json"), estimation_to_json(r));
      if (!est_truth.empty()) {
        const NodeLabels truth = load_labels(est_truth, g.n());
        if (static_cast<int>(truth.label_names.size()) > est_K) {
          throw PreconditionError("truth has more categories than --K");
        }
        const std::vector<int> codes = truth.codes();
        append_run_summary(out_file(globals, "run_summary.csv"), "estimate", g.n(), est_K,
                           misclassification(codes, tau_hat, est_K), adjusted_rand_index(codes, tau_hat));
      }
    } else if (*mc) {
      if (globals.config.empty()) throw PreconditionError("mc-sim needs --config");
      ExperimentConfig cfg = load_config(globals.config);
      if (app.get_option("--seed")->count() > 0) cfg.seed = globals.seed;
      const McResults r = run_mc_experiment(cfg);
      write_mc_results_csv(r, out_file(globals, "mc_results.csv"), timing);
      write_mc_summary_csv(r, out_file(globals, "mc_summary.csv"));
      write_mc_failures_csv(r, out_file(globals, "mc_failures.csv"));
      for (const auto& s : r.summary) {
        std::cout << "n=" << s.n << ' ' << pipeline_name(s.variant) << " mean_error_rate="
                  << format_double(s.mean_error_rate) << " completed=" << s.completed << " failed=" << s.failed
                  << '\n';
      }
    } else if (*ova) {
      Graph g = ova_graph.load();
      const NodeLabels labels = load_labels(ova_labels, g.n());
      json info;
      const int d = resolve_dimension(g, ova_d, ova_estimate, info);
      const auto rows = run_one_vs_all(LabeledGraph{std::move(g), labels}, parse_pipeline(ova_variant), d,
                                       globals.seed);
      write_one_vs_all_csv(rows, out_file(globals, "one_vs_all.csv"));
      for (const auto& row : rows) {
        std::cout << row.category << " size=" << row.size << " errors=" << row.error_count
                  << " ari=" << format_double(row.ari) << '\n';
      }
    } else {
      if (globals.config.empty()) throw PreconditionError("verify-bounds needs --config");
      ExperimentConfig cfg = load_config(globals.config);
      if (app.get_option("--seed")->count() > 0) cfg.seed = globals.seed;
      const auto reports = run_bound_verification(cfg);
      write_bounds_csv(reports, out_file(globals, "bounds.csv"));
      const auto tally = tally_bounds(reports);
      write_bound_tally_csv(tally, out_file(globals, "bounds_summary.csv"));
      for (const auto& t : tally) {
        std::cout << t.name << " n=" << t.n << " holds " << t.holds << '/' << t.runs
                  << (t.vacuous > 0 ? " (vacuous in " + std::to_string(t.vacuous) + ")" : "") << '\n';
      }
    }
  } catch (const sbmase::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
