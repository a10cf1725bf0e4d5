#include "commands.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace rendezvous::cli;
using nlohmann::json;

namespace {

const fs::path kScenarios = RENDEZVOUS_SCENARIO_DIR;

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

fs::path write_json(const fs::path& dir, const std::string& name, const json& doc) {
  const auto p = dir / name;
  std::ofstream(p) << doc.dump(2);
  return p;
}

json load_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json small_doc() {
  return json::parse(R"({
    "graph": {"n": 3, "edges": [{"from": 1, "to": 2, "weight": 1.0},
                                {"from": 2, "to": 3, "weight": 1.0},
                                {"from": 3, "to": 1, "weight": 1.0}]},
    "agents": [{"x": 0, "y": 0, "theta": 0}, {"x": 5, "y": 0, "theta": "pi"},
               {"x": 0, "y": 5, "theta": "-pi/2"}],
    "control": {"k1": 1.0},
    "sim": {"dt": 0.01, "t_end": 3.0, "tol": 0.01}
  })");
}

}  // namespace

TEST_CASE("run writes exactly its declared outputs") {
  TempDir dir("rendezvous_cli_run");
  const auto scenario = write_json(dir.path, "s.json", small_doc());
  Options opts;
  opts.out_dir = dir.path / "out";
  std::ostringstream out, err;
  CHECK(cmd_run(scenario, opts, out, err) == kOk);
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(*opts.out_dir)) names.push_back(e.path().filename());
  std::sort(names.begin(), names.end());
  CHECK(names == std::vector<std::string>{"report.json", "trajectory.csv", "trajectory.svg"});
  const auto report = load_json(*opts.out_dir / "report.json");
  for (const char* key : {"converged", "settle_time", "final_diameter", "has_reverse_spanning_tree"})
    CHECK(report.contains(key));
  CHECK(report["has_reverse_spanning_tree"] == true);

  const auto first = slurp(*opts.out_dir / "trajectory.csv");
  CHECK(cmd_run(scenario, opts, out, err) == kOk);
  CHECK(slurp(*opts.out_dir / "trajectory.csv") == first);
}

TEST_CASE("run: exit codes") {
  TempDir dir("rendezvous_cli_codes");
  Options opts;
  opts.out_dir = dir.path;
  std::ostringstream out, err;

  auto doc = small_doc();
  doc["graph"]["edges"].push_back({{"from", 2}, {"to", 2}, {"weight", 1.0}});
  CHECK(cmd_run(write_json(dir.path, "loop.json", doc), opts, out, err) == kGraphError);
  CHECK(err.str().find("self-loop 2→2") != std::string::npos);

  doc = small_doc();
  doc["control"].erase("k1");
  err.str("");
  CHECK(cmd_run(write_json(dir.path, "nok1.json", doc), opts, out, err) == kSchemaError);
  CHECK(err.str().find("k1") != std::string::npos);

  CHECK(cmd_run(dir.path / "missing.json", opts, out, err) == kSchemaError);
  std::ofstream(dir.path / "bad.json") << "{ not json";
  CHECK(cmd_run(dir.path / "bad.json", opts, out, err) == kSchemaError);

  // Huge gains with a coarse step blow the integration up.
  doc = small_doc();
  for (auto& e : doc["graph"]["edges"]) e["weight"] = 1e6;
  doc["sim"]["dt"] = 1.0;
  doc["sim"]["t_end"] = 100.0;
  CHECK(cmd_run(write_json(dir.path, "blowup.json", doc), opts, out, err) == kNonFiniteState);
}

TEST_CASE("run: missing spanning tree warns but runs") {
  TempDir dir("rendezvous_cli_notree");
  auto doc = small_doc();
  doc["graph"]["edges"] = json::array();
  Options opts;
  opts.out_dir = dir.path;
  std::ostringstream out, err;
  CHECK(cmd_run(write_json(dir.path, "s.json", doc), opts, out, err) == kOk);
  CHECK(load_json(dir.path / "report.json")["warning"] == "no convergence guarantee");
  CHECK(load_json(dir.path / "report.json")["converged"] == false);
}

TEST_CASE("analyze-graph") {
  Options opts;
  opts.json = true;
  std::ostringstream out, err;
  REQUIRE(cmd_analyze_graph(kScenarios / "layered.json", opts, out, err) == kOk);
  auto j = json::parse(out.str());
  CHECK(j["components"].size() == 4u);
  CHECK(j["layers"] == json::parse("[[1,2,3,4,5],[10,11,12],[7,8,9]]"));
  CHECK(j["has_reverse_spanning_tree"] == true);

  out.str("");
  REQUIRE(cmd_analyze_graph(kScenarios / "table1_fig5.json", opts, out, err) == kOk);
  j = json::parse(out.str());
  CHECK(j["has_reverse_spanning_tree"] == true);
  CHECK(j["laplacian_rank"] == 4);

  TempDir dir("rendezvous_cli_graph");
  auto doc = small_doc();
  doc["graph"]["n"] = 2;
  doc["graph"]["edges"] = json::array();
  doc["agents"].erase(2);
  out.str("");
  REQUIRE(cmd_analyze_graph(write_json(dir.path, "s.json", doc), opts, out, err) == kOk);
  CHECK(json::parse(out.str())["has_reverse_spanning_tree"] == false);
}

TEST_CASE("certify") {
  TempDir dir("rendezvous_cli_certify");
  Options opts;
  opts.out_dir = dir.path;
  std::ostringstream out, err;
  CHECK(cmd_certify(kScenarios / "table1_fig5_short.json", opts, out, err) == kOk);
  auto report = load_json(dir.path / "table1_fig5_short_report.json");
  for (const char* key : {"gamma", "alpha_star", "alpha", "sigma_estimate", "samples"})
    CHECK(report.contains(key));
  CHECK(report["sigma_estimate"].get<double>() > 0.0);

  opts.k1 = {1e-4};
  CHECK(cmd_certify(kScenarios / "table1_fig5_short.json", opts, out, err) == kCertificateFailed);
  report = load_json(dir.path / "table1_fig5_short_report.json");
  CHECK(report["worst_violation"]["dWdt"].get<double>() > 0.0);

  opts.k1.clear();
  CHECK(cmd_certify(kScenarios / "consensus.json", opts, out, err) == kOk);
  report = load_json(dir.path / "consensus_report.json");
  for (const auto& s : report["samples"]) {
    CHECK(s["V"] == 0.0);
    CHECK(s["dWdt"] == 0.0);
  }
}

TEST_CASE("sweep") {
  TempDir dir("rendezvous_cli_sweep");
  auto doc = small_doc();
  doc["sim"]["t_end"] = 40.0;
  doc["sim"]["tol"] = 0.5;
  const auto scenario = write_json(dir.path, "s.json", doc);
  Options opts;
  opts.out_dir = dir.path;
  opts.trials = 3;
  opts.seed = 5;
  std::ostringstream out, err;

  REQUIRE(cmd_sweep(scenario, opts, out, err) == kOk);
  const auto first = slurp(dir.path / "sweep.csv");
  CHECK(std::count(first.begin(), first.end(), '\n') == 5);  // header + 4 default k1 values
  CHECK(out.str().find("threshold") != std::string::npos);
  REQUIRE(cmd_sweep(scenario, opts, out, err) == kOk);
  CHECK(slurp(dir.path / "sweep.csv") == first);

  opts.k1 = {2.0};
  REQUIRE(cmd_sweep(scenario, opts, out, err) == kOk);
  const auto one = slurp(dir.path / "sweep.csv");
  CHECK(std::count(one.begin(), one.end(), '\n') == 2);
}
