#include "sbmase/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include "sbmase/error.hpp"
#include "sbmase/rng.hpp"

namespace sbmase {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

namespace {

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::trunc) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::out | mode);
  if (!out) throw PreconditionError("cannot write " + path.string());
  return out;
}

bool skippable(const std::string& line) {
  const auto first = line.find_first_not_of(" \t\r");
  return first == std::string::npos || line[first] == '#';
}

std::string where(const std::string& what, int line_no) {
  return what + " at line " + std::to_string(line_no);
}

// Reads exactly `count` whitespace-separated tokens; anything else is malformed.
std::vector<std::string> tokens(const std::string& line, std::size_t count, int line_no) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  if (out.size() != count) throw ParseError(where("expected " + std::to_string(count) + " fields", line_no));
  return out;
}

long long parse_int(const std::string& tok, int line_no) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw ParseError(where("not an integer: '" + tok + "'", line_no));
  }
  return value;
}

double parse_double(const std::string& tok, int line_no) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw ParseError(where("not a number: '" + tok + "'", line_no));
  }
  return value;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    if (!field.empty() && field.back() == '\r') field.pop_back();
    out.push_back(field);
  }
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

BlockModel model_from_json(const json& j) {
  try {
    const auto rows = j.at("P").get<std::vector<std::vector<double>>>();
    const auto rho = j.at("rho").get<std::vector<double>>();
    const auto K = static_cast<Eigen::Index>(rows.size());
    MatrixXd P(K, K);
    for (Eigen::Index i = 0; i < K; ++i) {
      if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != K) {
        throw InvalidModel("P must be square");
      }
      for (Eigen::Index k = 0; k < K; ++k) P(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    }
    std::optional<int> rank;
    if (j.contains("rank")) rank = j.at("rank").get<int>();
    return BlockModel::make(std::move(P),
                            Eigen::Map<const VectorXd>(rho.data(), static_cast<Eigen::Index>(rho.size())),
                            j.value("directed", false), rank);
  } catch (const json::exception& e) {
    throw ParseError(std::string("model JSON: ") + e.what());
  }
}

json model_to_json(const BlockModel& model) {
  json P = json::array();
  for (Eigen::Index i = 0; i < model.P().rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < model.P().cols(); ++k) row.push_back(model.P()(i, k));
    P.push_back(row);
  }
  return json{{"P", P},
              {"rho", std::vector<double>(model.rho().data(), model.rho().data() + model.rho().size())},
              {"directed", model.directed()}};
}

BlockModel load_model(const fs::path& path) { return model_from_json(read_json(path)); }

std::string model_hash(const BlockModel& model) {
  const std::string text = model_to_json(model).dump();
  std::uint64_t h = 0;
  for (unsigned char c : text) h = mix64(h ^ c);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json read_json(const fs::path& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) { open_out(path) << j.dump(2) << '\n'; }

Graph parse_edge_list(std::istream& in, int n, bool directed) {
  if (n < 1) throw PreconditionError("edge list needs n >= 1");
  Graph g(n, directed);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    const auto tok = tokens(line, 2, line_no);
    const long long u = parse_int(tok[0], line_no);
    const long long v = parse_int(tok[1], line_no);
    if (u < 0 || v < 0 || u >= n || v >= n) {
      throw OutOfRange(where("node id outside [0, " + std::to_string(n) + ")", line_no));
    }
    if (u == v) throw SelfLoop(where("self-loop on node " + std::to_string(u), line_no));
    g.add_edge(static_cast<int>(u), static_cast<int>(v));
  }
  return g;
}

Graph load_edge_list(const fs::path& path, int n, bool directed) {
  auto in = open_in(path);
  return parse_edge_list(in, n, directed);
}

std::string format_edge_list(const Graph& g) {
  std::string out;
  const MatrixXd& A = g.adjacency();
  for (int u = 0; u < g.n(); ++u) {
    for (int v = g.directed() ? 0 : u + 1; v < g.n(); ++v) {
      if (A(u, v) != 0.0) out += std::to_string(u) + ' ' + std::to_string(v) + '\n';
    }
  }
  return out;
}

void save_edge_list(const Graph& g, const fs::path& path) { open_out(path) << format_edge_list(g); }

std::vector<int> NodeLabels::codes() const {
  std::map<std::string, int> index;
  for (std::size_t k = 0; k < label_names.size(); ++k) index[label_names[k]] = static_cast<int>(k);
  std::vector<int> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(index.at(l));
  return out;
}

NodeLabels parse_labels(std::istream& in, int n) {
  if (n < 1) throw PreconditionError("labels need n >= 1");
  std::vector<std::string> labels(static_cast<std::size_t>(n));
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  // Label names in the order they first appear in the file.
  std::vector<std::string> names;
  std::map<std::string, bool> known;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    const auto tok = tokens(line, 2, line_no);
    const long long u = parse_int(tok[0], line_no);
    if (u < 0 || u >= n) throw OutOfRange(where("node id outside [0, " + std::to_string(n) + ")", line_no));
    const auto idx = static_cast<std::size_t>(u);
    if (seen[idx]) throw DuplicateNode(where("node " + std::to_string(u) + " labeled twice", line_no));
    seen[idx] = true;
    labels[idx] = tok[1];
    if (!known[tok[1]]) {
      known[tok[1]] = true;
      names.push_back(tok[1]);
    }
  }
  for (int u = 0; u < n; ++u) {
    if (!seen[static_cast<std::size_t>(u)]) throw MissingNode("node " + std::to_string(u) + " has no label");
  }
  return NodeLabels{std::move(labels), std::move(names)};
}

NodeLabels load_labels(const fs::path& path, int n) {
  auto in = open_in(path);
  return parse_labels(in, n);
}

void save_labels(const std::vector<int>& tau, const fs::path& path) {
  auto out = open_out(path);
  for (std::size_t u = 0; u < tau.size(); ++u) out << u << ' ' << tau[u] << '\n';
}

void write_coordinates_csv(const MatrixXd& coords, const fs::path& path) {
  auto out = open_out(path);
  out << "node";
  for (Eigen::Index k = 0; k < coords.cols(); ++k) out << ",coord_" << k + 1;
  out << '\n';
  for (Eigen::Index u = 0; u < coords.rows(); ++u) {
    out << u;
    for (Eigen::Index k = 0; k < coords.cols(); ++k) out << ',' << format_double(coords(u, k));
    out << '\n';
  }
}

MatrixXd read_coordinates_csv(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
  const auto header = split_csv(line);
  if (header.empty() || header[0] != "node") throw ParseError(where("expected header 'node,coord_1,...'", 1));
  const auto m = static_cast<Eigen::Index>(header.size() - 1);
  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    const auto fields = split_csv(line);
    if (static_cast<Eigen::Index>(fields.size()) != m + 1) throw ParseError(where("wrong field count", line_no));
    if (parse_int(fields[0], line_no) != static_cast<long long>(rows.size())) {
      throw ParseError(where("rows must be ordered by node id", line_no));
    }
    std::vector<double> row;
    for (Eigen::Index k = 1; k <= m; ++k) row.push_back(parse_double(fields[static_cast<std::size_t>(k)], line_no));
    rows.push_back(std::move(row));
  }
  MatrixXd out(static_cast<Eigen::Index>(rows.size()), m);
  for (std::size_t u = 0; u < rows.size(); ++u) {
    for (Eigen::Index k = 0; k < m; ++k) out(static_cast<Eigen::Index>(u), k) = rows[u][static_cast<std::size_t>(k)];
  }
  return out;
}

void write_clustering_csv(const std::vector<int>& tau_hat, const fs::path& path) {
  auto out = open_out(path);
  out << "node,label\n";
  for (std::size_t u = 0; u < tau_hat.size(); ++u) out << u << ',' << tau_hat[u] << '\n';
}

std::vector<int> read_clustering_csv(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || split_csv(line) != std::vector<std::string>{"node", "label"}) {
    throw ParseError(where("expected header 'node,label'", 1));
  }
  std::vector<int> tau;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 2) throw ParseError(where("wrong field count", line_no));
    if (parse_int(fields[0], line_no) != static_cast<long long>(tau.size())) {
      throw ParseError(where("rows must be ordered by node id", line_no));
    }
    tau.push_back(static_cast<int>(parse_int(fields[1], line_no)));
  }
  return tau;
}

json clustering_summary(const Clustering& c) {
  return json{{"objective", c.objective},
              {"iterations", c.iterations},
              {"best_restart", c.best_restart},
              {"has_empty_clusters", c.has_empty_clusters},
              {"objective_history", c.objective_history}};
}

namespace {

json matrix_json(const MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    out.push_back(row);
  }
  return out;
}

}  // namespace

json estimation_to_json(const EstimationReport& r) {
  return json{{"n_hat", r.n_hat},
              {"rho_hat", std::vector<double>(r.rho_hat.data(), r.rho_hat.data() + r.rho_hat.size())},
              {"P_hat", matrix_json(r.P_hat)},
              {"nu_hat", matrix_json(r.nu_hat)},
              {"mu_hat", matrix_json(r.mu_hat)}};
}

void append_run_summary(const fs::path& path, const std::string& name, int n, int K,
                        const MisclassificationResult& m, const AriResult& ari) {
  const bool fresh = !fs::exists(path);
  auto out = open_out(path, std::ios::app);
  if (fresh) out << "name,n,K,error_count,error_rate,ari\n";
  out << name << ',' << n << ',' << K << ',' << m.errors << ',' << format_double(m.rate) << ','
      << format_double(ari.value) << '\n';
}

void write_bounds_csv(const std::vector<BoundReport>& reports, const fs::path& path) {
  auto out = open_out(path);
  out << "bound,n,seed,lhs,rhs,holds\n";
  for (const auto& r : reports) {
    out << r.name << ',' << r.context.n << ',' << r.context.seed << ',' << format_double(r.lhs) << ','
        << format_double(r.rhs) << ',' << (r.holds ? "true" : "false") << '\n';
  }
}

}  // namespace sbmase
