#include "sbmase/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include "sbmase/clustering.hpp"
#include "sbmase/error.hpp"
#include "sbmase/inference.hpp"
#include "sbmase/rng.hpp"
#include "sbmase/spectral.hpp"

namespace sbmase {

using Eigen::MatrixXd;
using nlohmann::json;

namespace {

constexpr int kMinBoundNodes = 25;

// Runs body(i) for i in [0, count) on up to `threads` workers. The first
// exception thrown by any worker is rethrown after all workers finish.
template <typename Body>
void parallel_for(int count, int threads, Body body) {
  const int workers = std::max(1, std::min(threads, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          const std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct Replicate {
  BlockAssignment tau;
  Graph graph;
};

Replicate draw_replicate(const ExperimentConfig& cfg, int n, int replicate) {
  const std::uint64_t seed = replicate_seed(cfg.seed, n, replicate);
  BlockAssignment tau = sample_tau(cfg.model, n, cfg.tau_mode, seed);
  Graph g = sample_graph(cfg.model, tau, seed, cfg.edge_keep_prob);
  return Replicate{std::move(tau), std::move(g)};
}

bool is_scaled(Pipeline p) {
  return p == Pipeline::ScaledAdjacency || p == Pipeline::ScaledLaplacian;
}

bool is_laplacian(Pipeline p) {
  return p == Pipeline::ScaledLaplacian || p == Pipeline::UnscaledLaplacian;
}

Embedding embed_for(const Graph& g, Pipeline p, int d, bool augment) {
  if (is_laplacian(p)) return embed_laplacian(g, d);
  if (augment) return embed_matrix(augment_diagonal(g), d);
  return embed_adjacency(g, d);
}

// Left coordinates for undirected graphs, the concatenation otherwise.
EmbeddingVariant coordinates_for(Pipeline p, bool directed) {
  if (directed) return is_scaled(p) ? EmbeddingVariant::ScaledConcat : EmbeddingVariant::UnscaledConcat;
  return is_scaled(p) ? EmbeddingVariant::ScaledLeft : EmbeddingVariant::UnscaledLeft;
}

std::ofstream open_csv(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw PreconditionError("cannot write " + path.string());
  return out;
}

}  // namespace

std::string pipeline_name(Pipeline p) {
  switch (p) {
    case Pipeline::ScaledAdjacency:
      return "scaled_adjacency";
    case Pipeline::UnscaledAdjacency:
      return "unscaled_adjacency";
    case Pipeline::ScaledLaplacian:
      return "scaled_laplacian";
    case Pipeline::UnscaledLaplacian:
      return "unscaled_laplacian";
  }
  throw PreconditionError("unknown pipeline");
}

Pipeline parse_pipeline(const std::string& name) {
  for (Pipeline p : {Pipeline::ScaledAdjacency, Pipeline::UnscaledAdjacency, Pipeline::ScaledLaplacian,
                     Pipeline::UnscaledLaplacian}) {
    if (pipeline_name(p) == name) return p;
  }
  throw ParseError("unknown variant '" + name + "'");
}

void ExperimentConfig::validate() const {
  if (n_grid.empty()) throw PreconditionError("n_grid must be nonempty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1) throw PreconditionError("n_grid entries must be positive");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw PreconditionError("n_grid must be strictly ascending");
  }
  if (replicates < 1) throw PreconditionError("replicates must be >= 1");
  if (variants.empty()) throw PreconditionError("variants must be nonempty");
  if (!(edge_keep_prob > 0.0 && edge_keep_prob <= 1.0)) {
    throw PreconditionError("edge_keep_prob must lie in (0, 1]");
  }
  if (d && *d < 1) throw PreconditionError("d must be positive");
  if (threads < 1) throw PreconditionError("threads must be >= 1");
}

ExperimentConfig config_from_json(const json& j, const fs::path& base_dir) {
  try {
    const json& m = j.at("model");
    ExperimentConfig cfg(m.is_string() ? load_model(base_dir / m.get<std::string>()) : model_from_json(m));
    cfg.n_grid = j.at("n_grid").get<std::vector<int>>();
    cfg.replicates = j.value("replicates", 1);
    cfg.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("variants")) {
      cfg.variants.clear();
      for (const auto& v : j.at("variants")) cfg.variants.push_back(parse_pipeline(v.get<std::string>()));
    }
    const auto mode = j.value("tau_mode", std::string("exact"));
    if (mode == "exact") {
      cfg.tau_mode = TauMode::Exact;
    } else if (mode == "multinomial") {
      cfg.tau_mode = TauMode::Multinomial;
    } else {
      throw ParseError("tau_mode must be 'exact' or 'multinomial'");
    }
    cfg.diagonal_augment = j.value("diagonal_augment", false);
    cfg.edge_keep_prob = j.value("edge_keep_prob", 1.0);
    if (j.contains("d")) cfg.d = j.at("d").get<int>();
    cfg.threads = j.value("threads", 1);
    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw ParseError(std::string("config JSON: ") + e.what());
  }
}

ExperimentConfig load_config(const fs::path& path) {
  return config_from_json(read_json(path), path.parent_path());
}

std::uint64_t replicate_seed(std::uint64_t seed, int n, int replicate) {
  return derive_seed(seed, {kReplicateStream, static_cast<std::uint64_t>(n),
                            static_cast<std::uint64_t>(replicate)});
}

std::uint64_t cluster_seed(std::uint64_t seed, int n, int replicate, Pipeline p) {
  return derive_seed(seed, {kReplicateStream, static_cast<std::uint64_t>(n),
                            static_cast<std::uint64_t>(replicate),
                            1 + static_cast<std::uint64_t>(p)});
}

McResults run_mc_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const int K = cfg.model.K();
  const int d = cfg.dimension();
  const auto cells = static_cast<int>(cfg.n_grid.size()) * cfg.replicates;
  const auto V = cfg.variants.size();

  struct Outcome {
    bool ok = false;
    McRow row;
    std::string message;
  };
  std::vector<Outcome> outcomes(static_cast<std::size_t>(cells) * V);

  parallel_for(cells, cfg.threads, [&](int cell) {
    const int n = cfg.n_grid[static_cast<std::size_t>(cell / cfg.replicates)];
    const int rep = cell % cfg.replicates;
    std::optional<Replicate> sample;
    std::string sample_error;
    try {
      sample = draw_replicate(cfg, n, rep);
    } catch (const std::exception& e) {
      sample_error = e.what();
    }
    for (std::size_t v = 0; v < V; ++v) {
      Outcome& out = outcomes[static_cast<std::size_t>(cell) * V + v];
      const Pipeline p = cfg.variants[v];
      out.row = McRow{n, rep, p, 0, 0.0, 0.0};
      if (!sample) {
        out.message = sample_error;
        continue;
      }
      try {
        const auto start = std::chrono::steady_clock::now();
        const Embedding emb = embed_for(sample->graph, p, d, cfg.diagonal_augment);
        const Clustering c = cluster_mse(select_coordinates(emb, coordinates_for(p, cfg.model.directed())), K,
                                         KMeansOptions{}, cluster_seed(cfg.seed, n, rep, p));
        const MisclassificationResult m = misclassification(sample->tau.tau, c.tau_hat, K);
        const auto stop = std::chrono::steady_clock::now();
        out.row.error_count = m.errors;
        out.row.error_rate = m.rate;
        out.row.runtime_ms = std::chrono::duration<double, std::milli>(stop - start).count();
        out.ok = true;
      } catch (const std::exception& e) {
        out.message = e.what();
      }
    }
  });

  McResults r;
  std::map<std::pair<int, std::size_t>, McSummaryRow> summary;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const Outcome& o = outcomes[i];
    const std::size_t v = i % V;
    auto& s = summary[{o.row.n, v}];
    s.n = o.row.n;
    s.variant = o.row.variant;
    if (o.ok) {
      r.rows.push_back(o.row);
      ++s.completed;
      s.mean_error_count += o.row.error_count;
      s.mean_error_rate += o.row.error_rate;
    } else {
      r.failures.push_back(McFailure{o.row.n, o.row.replicate, o.row.variant, o.message});
      ++s.failed;
    }
  }
  for (auto& [key, s] : summary) {
    if (s.completed > 0) {
      s.mean_error_count /= s.completed;
      s.mean_error_rate /= s.completed;
    }
    r.summary.push_back(s);
  }
  return r;
}

void write_mc_results_csv(const McResults& r, const fs::path& path, bool with_timing) {
  auto out = open_csv(path);
  out << "n,replicate,variant,error_count,error_rate,runtime_ms\n";
  for (const auto& row : r.rows) {
    out << row.n << ',' << row.replicate << ',' << pipeline_name(row.variant) << ',' << row.error_count << ','
        << format_double(row.error_rate) << ',' << (with_timing ? format_double(row.runtime_ms) : "0") << '\n';
  }
}

void write_mc_summary_csv(const McResults& r, const fs::path& path) {
  auto out = open_csv(path);
  out << "n,variant,completed,failed,mean_error_count,mean_error_rate\n";
  for (const auto& s : r.summary) {
    out << s.n << ',' << pipeline_name(s.variant) << ',' << s.completed << ',' << s.failed << ','
        << format_double(s.mean_error_count) << ',' << format_double(s.mean_error_rate) << '\n';
  }
}

void write_mc_failures_csv(const McResults& r, const fs::path& path) {
  auto out = open_csv(path);
  out << "n,replicate,variant,message\n";
  for (const auto& f : r.failures) {
    std::string msg = f.message;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    out << f.n << ',' << f.replicate << ',' << pipeline_name(f.variant) << ',' << msg << '\n';
  }
}

std::vector<OneVsAllRow> run_one_vs_all(const LabeledGraph& lg, Pipeline variant, int d, std::uint64_t seed) {
  const auto& names = lg.labels.label_names;
  if (names.size() < 2) throw PreconditionError("one-vs-all needs at least 2 categories");
  const Graph& g = lg.graph;
  if (static_cast<int>(lg.labels.labels.size()) != g.n()) throw PreconditionError("labels must have length n");

  const Embedding emb = embed_for(g, variant, d, false);
  const Clustering c = cluster_mse(select_coordinates(emb, coordinates_for(variant, g.directed())), 2,
                                   KMeansOptions{}, derive_seed(seed, {kClusterStream}));
  const std::vector<int> codes = lg.labels.codes();

  std::vector<OneVsAllRow> rows;
  for (std::size_t k = 0; k < names.size(); ++k) {
    std::vector<int> truth(codes.size());
    for (std::size_t u = 0; u < codes.size(); ++u) truth[u] = codes[u] == static_cast<int>(k) ? 1 : 0;
    const MisclassificationResult m = misclassification(truth, c.tau_hat, 2);
    OneVsAllRow row;
    row.category = names[k];
    row.size = static_cast<int>(std::count(truth.begin(), truth.end(), 1));
    row.error_count = m.errors;
    row.error_rate = m.rate;
    row.ari = adjusted_rand_index(truth, c.tau_hat).value;
    rows.push_back(row);
  }
  return rows;
}

void write_one_vs_all_csv(const std::vector<OneVsAllRow>& rows, const fs::path& path) {
  auto out = open_csv(path);
  out << "category,size,error_count,error_rate,ari\n";
  for (const auto& r : rows) {
    out << r.category << ',' << r.size << ',' << r.error_count << ',' << format_double(r.error_rate) << ','
        << format_double(r.ari) << '\n';
  }
}

std::vector<BoundReport> run_bound_verification(const ExperimentConfig& cfg) {
  cfg.validate();
  for (int n : cfg.n_grid) {
    if (n < kMinBoundNodes) {
      throw PreconditionError("bound verification requires n >= 25, got " + std::to_string(n));
    }
  }
  const BlockModel& model = cfg.model;
  const bool has_rank = model.rank() > 0;
  const int d = has_rank ? cfg.dimension() : 0;
  std::optional<ModelConstants> consts;
  if (has_rank) {
    const BlockModel effective = cfg.edge_keep_prob < 1.0 ? model.thinned(cfg.edge_keep_prob) : model;
    consts = compute_constants(effective, factorize_p(effective));
  }
  const std::string hash = model_hash(model);
  const bool undirected = !model.directed();

  const int cells = static_cast<int>(cfg.n_grid.size()) * cfg.replicates;
  std::vector<std::vector<BoundReport>> per_cell(static_cast<std::size_t>(cells));

  parallel_for(cells, cfg.threads, [&](int cell) {
    const int n = cfg.n_grid[static_cast<std::size_t>(cell / cfg.replicates)];
    const int rep = cell % cfg.replicates;
    const Replicate s = draw_replicate(cfg, n, rep);
    const EdgeProbMatrix Q(edge_probability_matrix(model, s.tau, cfg.edge_keep_prob));
    auto& out = per_cell[static_cast<std::size_t>(cell)];

    out.push_back(check_gram_concentration(s.graph, Q));
    if (!has_rank) {
      const double sigma1 = singular_values(s.graph.adjacency())(0);
      out.push_back(make_report("sigma1_A", sigma1, n, Relation::AtMost));
    } else {
      for (auto& r : check_sigma_bounds(s.graph, Q, *consts, d)) out.push_back(std::move(r));
      out.push_back(check_row_gaps(embed_matrix(Q, d), s.tau.tau, *consts));
      for (auto& r : check_weyl(s.graph, Q, d)) out.push_back(std::move(r));
      out.push_back(check_davis_kahan(s.graph, Q, d));

      if (model.K() >= 2) {
        const Embedding emb = embed_adjacency(s.graph, d);
        const auto unscaled = undirected ? EmbeddingVariant::UnscaledLeft : EmbeddingVariant::UnscaledConcat;
        const auto scaled = undirected ? EmbeddingVariant::ScaledLeft : EmbeddingVariant::ScaledConcat;
        const std::uint64_t seed = replicate_seed(cfg.seed, n, rep);
        const Clustering cw = assign_blocks(emb, unscaled, model.K(), seed);
        const Clustering cz = assign_blocks(emb, scaled, model.K(), seed);
        out.push_back(check_misclassification("misclassification_unscaled", misclassification(s.tau.tau, cw.tau_hat, model.K()).errors,
                                              misclassification_bound(*consts, n, undirected), n));
        out.push_back(check_misclassification("misclassification_scaled",
                                              misclassification(s.tau.tau, cz.tau_hat, model.K()).errors,
                                              misclassification_bound_scaled(*consts, n), n));
      }
    }
    for (auto& r : out) r.context = BoundContext{n, replicate_seed(cfg.seed, n, rep), hash};
  });

  std::vector<BoundReport> all;
  for (auto& cell : per_cell) {
    for (auto& r : cell) all.push_back(std::move(r));
  }
  return all;
}

std::vector<BoundTally> tally_bounds(const std::vector<BoundReport>& reports) {
  std::vector<BoundTally> out;
  std::map<std::pair<std::string, int>, std::size_t> index;
  for (const auto& r : reports) {
    const auto key = std::make_pair(r.name, r.context.n);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, out.size()).first;
      out.push_back(BoundTally{r.name, r.context.n, 0, 0, 0});
    }
    BoundTally& t = out[it->second];
    ++t.runs;
    t.holds += r.holds ? 1 : 0;
    t.vacuous += r.vacuous ? 1 : 0;
  }
  return out;
}

void write_bound_tally_csv(const std::vector<BoundTally>& tally, const fs::path& path) {
  auto out = open_csv(path);
  out << "bound,n,runs,holds,vacuous\n";
  for (const auto& t : tally) out << t.name << ',' << t.n << ',' << t.runs << ',' << t.holds << ',' << t.vacuous << '\n';
}

}  // namespace sbmase
