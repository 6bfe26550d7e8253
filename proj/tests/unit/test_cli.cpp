#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "latcover/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kData = LATCOVER_TEST_DATA;

struct Run {
  int status;
  std::string out;
  std::string err;
  json doc() const { return json::parse(out); }
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "latcover");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = latcover::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

std::string data(const char* name) { return kData + "/" + name; }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "latcover-cli-tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("constants") {
  const Run r = run({"constants", "--d", "2", "--D", "hex"});
  REQUIRE(r.status == 0);
  const json j = r.doc();
  CHECK(std::abs(j["beta"]["value"].get<double>() - 1.85837) <= 1e-5);
  CHECK(std::abs(j["gamma"]["value"].get<double>() - 1.85837) <= 1e-5);
  CHECK(j["alpha"]["provenance"].is_string());
  CHECK(j["c_pt_exact"]["value"] == "1406408618241");

  const Run sched = run({"constants", "--d", "2", "--D", "hex", "--n", "8", "--k", "3"});
  REQUIRE(sched.status == 0);
  CHECK(sched.doc()["eta_negative"]["value"] == true);
  CHECK(sched.doc()["density_bound"]["value"].is_null());
  CHECK(run({"constants", "--d", "2", "--D", "100"}).status == 2);
  CHECK(run({"constants", "--d", "2", "--D", "round"}).status == 2);
}

TEST_CASE("verify-robust") {
  const Run ok = run({"verify-robust", "--lattice", data("hex.json"), "--radius", "1.1547117",
                      "--grid", "0.001"});
  CHECK(ok.status == 0);
  CHECK(ok.doc()["certificate"]["verdict"] == "Robust");
  const Run bad = run({"verify-robust", "--lattice", data("hex.json"), "--radius", "1.15", "--grid", "0.01"});
  CHECK(bad.status == 0);
  CHECK(bad.doc()["certificate"]["verdict"] == "NotRobust");
  CHECK(bad.doc()["certificate"]["witness"].size() == 2);
  const Run file_radius = run({"verify-robust", "--lattice", data("hex.json"), "--grid", "0.01"});
  // The exact hexagonal radius is tight, so no finite grid can certify it.
  CHECK(file_radius.status == 3);
  CHECK(file_radius.doc()["certificate"]["verdict"] == "Inconclusive");
  CHECK(file_radius.doc()["certificate"]["radius"] == 1.1547005383792517);
}

TEST_CASE("verify-robust grid dump") {
  const fs::path csv = scratch("grid.csv");
  const fs::path manifest = scratch("grid.manifest.json");
  const Run r = run({"verify-robust", "--lattice", data("hex.json"), "--radius", "1.2", "--grid", "0.05",
                     "--csv", csv.string(), "--manifest", manifest.string()});
  REQUIRE(r.status == 0);
  CHECK(slurp(csv).rfind("w1,w2,f\n", 0) == 0);
  const json m = json::parse(slurp(manifest));
  CHECK(m["command"] == "verify-robust");
  CHECK(m["outputs"][0] == csv.string());
}

TEST_CASE("min-radius and search") {
  const Run z1 = run({"min-radius", "--lattice", data("z1.json"), "--tol", "1e-3"});
  REQUIRE(z1.status == 0);
  const json b = z1.doc()["result"]["bracket"];
  CHECK(b["lo"].get<double>() <= 1.0);
  CHECK(b["hi"].get<double>() >= 1.0);
  const Run s = run({"search", "--seed", "2", "--iters", "0"});
  REQUIRE(s.status == 0);
  CHECK(s.doc()["result"]["baseline"] == true);
}

TEST_CASE("estimate") {
  const Run r = run({"estimate", "--lattice", data("z2.json"), "--body", data("b05.json"),
                     "--samples", "100000", "--seed", "1"});
  REQUIRE(r.status == 0);
  const json e = r.doc()["estimate"];
  CHECK(std::abs(e["estimate"].get<double>() - (1.0 - std::numbers::pi / 4.0)) <=
        3.0 * e["ci95_halfwidth"].get<double>());
  CHECK(e["samples"] == 100000);
}

TEST_CASE("identical arguments give identical output") {
  const std::vector<std::string> args = {"estimate", "--lattice", data("z2.json"), "--body",
                                         data("b05.json"), "--samples", "30000", "--seed", "5"};
  const Run a = run(args);
  auto threaded = args;
  threaded.insert(threaded.end(), {"--threads", "3"});
  const Run b = run(threaded);
  CHECK(a.out == b.out);
  const Run c = run({"estimate", "--lattice", data("z2.json"), "--body", data("b05.json"),
                     "--samples", "30000", "--seed", "6"});
  CHECK(a.out != c.out);
}

TEST_CASE("manifest") {
  const Run r = run({"estimate", "--lattice", data("z2.json"), "--body", data("b05.json"),
                     "--samples", "1000", "--seed", "9"});
  const json m = json::parse(r.err);
  CHECK(m["command"] == "estimate");
  CHECK(m["seed"] == 9);
  CHECK(m["parameters"]["--samples"] == "1000");
  CHECK(m["versions"].get<std::string>().rfind("latcover", 0) == 0);
  CHECK(m["wall_time_ms"].is_number_integer());
  CHECK(m["outputs"].empty());
}

TEST_CASE("out file and manifest reproduce the run") {
  const fs::path out = scratch("est.json");
  const Run first = run({"estimate", "--lattice", data("z2.json"), "--body", data("b05.json"),
                         "--samples", "5000", "--seed", "4", "--out", out.string()});
  REQUIRE(first.status == 0);
  CHECK(first.out.empty());
  const std::string text = slurp(out);
  const json m = json::parse(first.err);
  CHECK(m["outputs"][0] == out.string());
  std::vector<std::string> args = {m["command"].get<std::string>()};
  for (const auto& [k, v] : m["parameters"].items()) {
    args.push_back(k);
    args.push_back(v.get<std::string>());
  }
  REQUIRE(run(args).status == 0);
  CHECK(slurp(out) == text);
}

TEST_CASE("config file and environment") {
  const fs::path cfg = scratch("run.cfg");
  {
    std::ofstream f(cfg);
    f << "seed=5\nsamples=30000\n";
  }
  const Run direct = run({"estimate", "--lattice", data("z2.json"), "--body", data("b05.json"),
                          "--samples", "30000", "--seed", "5"});
  const Run from_cfg = run({"estimate", "--lattice", data("z2.json"), "--body", data("b05.json"),
                            "--config", cfg.string()});
  CHECK(from_cfg.status == 0);
  CHECK(from_cfg.out == direct.out);
  const Run overridden = run({"estimate", "--lattice", data("z2.json"), "--body", data("b05.json"),
                              "--config", cfg.string(), "--seed", "6"});
  CHECK(overridden.doc()["seed"] == 6);
  ::setenv("LATCOVER_CONFIG", cfg.string().c_str(), 1);
  const Run from_env = run({"estimate", "--lattice", data("z2.json"), "--body", data("b05.json")});
  ::unsetenv("LATCOVER_CONFIG");
  CHECK(from_env.out == direct.out);
}

TEST_CASE("lift") {
  const Run r = run({"lift", "--base", data("z1.json"), "--robust", "cube(1)", "--body", data("i045.json"),
                     "--delta", "0.1", "--seed", "1", "--tau", "3", "--samples", "100000"});
  REQUIRE(r.status == 0);
  const json res = r.doc()["result"];
  CHECK(res["estimate"]["ci95_upper"].get<double>() <= 0.03);
  CHECK(res["lifted"]["dim"] == 2);
  const Run budget = run({"lift", "--base", data("z2.json"), "--body", data("b03.json"), "--delta", "0.9",
                          "--tau", "1e-9", "--samples", "2000", "--max-tries", "2"});
  CHECK(budget.status == 3);
  CHECK(budget.doc()["error"] == "MaxTriesExceeded");
}

TEST_CASE("pipeline") {
  const fs::path csv = scratch("stages.csv");
  const Run r = run({"pipeline", "--n", "3", "--d", "1", "--k", "2", "--initial-lattice", data("z1.json"),
                     "--initial-body", data("i045.json"), "--samples", "100000", "--seed", "1", "--csv",
                     csv.string()});
  REQUIRE(r.status == 0);
  CHECK(r.doc()["result"]["coverage_check"]["all_covered"] == true);
  CHECK(r.doc()["robust"] == "cube(1)");
  const std::string trace = slurp(csv);
  CHECK(trace.rfind("stage,dim,delta,ci,resamples\n", 0) == 0);
  CHECK(std::count(trace.begin(), trace.end(), '\n') == 4);

  const Run uncovered = run({"pipeline", "--n", "2", "--d", "1", "--k", "0", "--initial-lattice",
                             data("z2.json"), "--initial-body", data("b03.json"), "--samples", "10000"});
  CHECK(uncovered.status == 4);
  CHECK(uncovered.doc()["result"]["coverage_check"]["all_covered"] == false);
}

TEST_CASE("check-lemmas" * doctest::timeout(300)) {
  const Run r = run({"check-lemmas", "--seed", "1"});
  CHECK(r.status == 0);
  CHECK(r.doc()["all_passed"] == true);
  CHECK(r.doc()["checks"].size() == 4);
}

TEST_CASE("errors map to exit codes") {
  CHECK(run({"frobnicate"}).status == 2);
  CHECK(run({}).status == 2);
  CHECK(run({"estimate", "--lattice", data("broken.json"), "--body", data("b05.json")}).status == 2);
  CHECK(run({"estimate", "--lattice", data("missing.json"), "--body", data("b05.json")}).status == 2);
  CHECK(run({"estimate", "--lattice", data("z1.json"), "--body", data("b05.json")}).status == 2);
  CHECK(run({"estimate", "--lattice", data("z2.json")}).status == 2);
  CHECK(run({"estimate", "--bogus-flag"}).status == 2);
  CHECK(run({"--help"}).status == 0);
}

}  // TEST_SUITE
