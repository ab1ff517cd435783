#include <doctest.h>

#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "sbmase/error.hpp"
#include "sbmase/io.hpp"

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
  const fs::path dir = fs::temp_directory_path() / "sbmase_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line + "\n";
}

}  // namespace

TEST_CASE("edge list parsing") {
  std::istringstream in("0 1\n1 2");
  const Graph g = parse_edge_list(in, 3, false);
  MatrixXd expected = MatrixXd::Zero(3, 3);
  expected(0, 1) = expected(1, 0) = expected(1, 2) = expected(2, 1) = 1;
  CHECK(g.adjacency() == expected);

  std::istringstream loop("0 1\n2 2\n");
  CHECK_THROWS_AS(parse_edge_list(loop, 3, false), SelfLoop);
  std::istringstream range("0 3\n");
  CHECK_THROWS_AS(parse_edge_list(range, 3, false), OutOfRange);
  std::istringstream junk("0 1\n0 x\n");
  try {
    parse_edge_list(junk, 3, false);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  std::istringstream three("0 1 2\n");
  CHECK_THROWS_AS(parse_edge_list(three, 3, false), ParseError);
}

TEST_CASE("directed edge lists keep orientation") {
  std::istringstream in("0 1\n2 0\n");
  const Graph g = parse_edge_list(in, 3, true);
  CHECK(g.adjacency()(0, 1) == 1);
  CHECK(g.adjacency()(1, 0) == 0);
  CHECK(format_edge_list(g) == "0 1\n2 0\n");
}

TEST_CASE("edge list round trip is canonical and idempotent") {
  const Graph g = load_edge_list(kData / "messy.edges", 4, false);
  const fs::path out = scratch("round.edges");
  save_edge_list(g, out);
  CHECK(slurp(out) == slurp(kData / "canonical.edges"));
  const Graph again = load_edge_list(out, 4, false);
  save_edge_list(again, out);
  CHECK(slurp(out) == slurp(kData / "canonical.edges"));
}

TEST_CASE("label files") {
  std::istringstream ok("0 Math\n1 Date\n");
  const NodeLabels l = parse_labels(ok, 2);
  CHECK(l.labels == std::vector<std::string>{"Math", "Date"});
  CHECK(l.label_names == std::vector<std::string>{"Math", "Date"});
  CHECK(l.codes() == std::vector<int>{0, 1});

  std::istringstream missing("0 Math\n");
  CHECK_THROWS_AS(parse_labels(missing, 2), MissingNode);
  std::istringstream dup("0 Math\n0 Date\n1 Math\n");
  CHECK_THROWS_AS(parse_labels(dup, 2), DuplicateNode);
  std::istringstream bad("zero Math\n");
  CHECK_THROWS_AS(parse_labels(bad, 1), ParseError);
}

TEST_CASE("five-category label file with the reference counts") {
  const std::vector<std::pair<std::string, int>> categories{
      {"Category", 119}, {"Person", 372}, {"Location", 270}, {"Date", 191}, {"Math", 430}};
  std::ostringstream text;
  int node = 0;
  for (const auto& [name, count] : categories) {
    for (int i = 0; i < count; ++i) text << node++ << ' ' << name << '\n';
  }
  REQUIRE(node == 1382);
  std::istringstream in(text.str());
  const NodeLabels l = parse_labels(in, 1382);
  REQUIRE(l.label_names.size() == 5);
  const auto codes = l.codes();
  for (std::size_t k = 0; k < categories.size(); ++k) {
    CHECK(l.label_names[k] == categories[k].first);
    CHECK(std::count(codes.begin(), codes.end(), static_cast<int>(k)) == categories[k].second);
  }
}

TEST_CASE("model JSON") {
  const BlockModel m = load_model(kData / "model.json");
  CHECK(m.K() == 2);
  CHECK(m.P()(1, 1) == 0.5);
  CHECK_FALSE(m.directed());
  const BlockModel back = model_from_json(model_to_json(m));
  CHECK(back.P() == m.P());
  CHECK(model_hash(back) == model_hash(m));
  CHECK(model_hash(m).size() == 16);
  CHECK_THROWS_AS(model_from_json(nlohmann::json{{"rho", {1.0}}}), ParseError);
}

TEST_CASE("coordinate CSV round trip and schema") {
  std::mt19937_64 gen(3);
  const MatrixXd Z = testing::random_gaussian(7, 2, gen);
  const fs::path out = scratch("coords.csv");
  write_coordinates_csv(Z, out);
  CHECK(first_line(out) == slurp(kData / "embedding.header"));
  CHECK(read_coordinates_csv(out) == Z);
}

TEST_CASE("clustering CSV and summaries") {
  const fs::path out = scratch("clusters.csv");
  write_clustering_csv({1, 0, 1}, out);
  CHECK(slurp(out) == "node,label\n0,1\n1,0\n2,1\n");
  CHECK(read_clustering_csv(out) == std::vector<int>{1, 0, 1});

  const fs::path summary = scratch("run_summary.csv");
  fs::remove(summary);
  append_run_summary(summary, "a", 4, 2, MisclassificationResult{1, 0.25, {0, 1}}, AriResult{0.5, false});
  append_run_summary(summary, "b", 4, 2, MisclassificationResult{0, 0.0, {1, 0}}, AriResult{1.0, false});
  CHECK(slurp(summary) == "name,n,K,error_count,error_rate,ari\na,4,2,1,0.25,0.5\nb,4,2,0,0,1\n");
}

TEST_CASE("bounds CSV schema") {
  BoundReport r = make_report("gram_concentration", 1.5, 2.0, Relation::AtMost);
  r.context = BoundContext{200, 9, "x"};
  const fs::path out = scratch("bounds.csv");
  write_bounds_csv({r}, out);
  CHECK(first_line(out) == slurp(kData / "bounds.header"));
  CHECK(slurp(out) == slurp(kData / "bounds.header") + "gram_concentration,200,9,1.5,2,true\n");
}

TEST_CASE("number formatting round-trips") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5}) {
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(0.5) == "0.5");
}
