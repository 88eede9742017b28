#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "tdnetgen/dataset.hpp"
#include "tdnetgen/theory.hpp"

namespace fs = std::filesystem;
using namespace tdnetgen;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "tdnetgen_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(TDNETGEN_BIN) + " " + args + " > " + (kRoot / "last.log").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string config_args(const fs::path& out, int seed) {
  return std::string("--config ") + TINY_CONFIG + " --seed " + std::to_string(seed) + " --out " + out.string();
}

// Every regular file under `dir`, keyed by relative path.
std::map<std::string, std::string> tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
  return out;
}

struct Fixture {
  Fixture() {
    fs::remove_all(kRoot);
    fs::create_directories(kRoot);
  }
};

}  // namespace

TEST_CASE_FIXTURE(Fixture, "gen-data is deterministic in the seed") {
  REQUIRE(run("gen-data " + config_args(kRoot / "a", 1)) == 0);
  REQUIRE(run("gen-data " + config_args(kRoot / "b", 1)) == 0);
  REQUIRE(run("gen-data " + config_args(kRoot / "c", 2)) == 0);
  const auto a = tree(kRoot / "a" / "data"), b = tree(kRoot / "b" / "data"), c = tree(kRoot / "c" / "data");
  CHECK(a.size() > 10);
  CHECK(a == b);
  CHECK(a.at("manifest.json") != c.at("manifest.json"));

  // The recorded config reproduces the run.
  REQUIRE(run("gen-data --config " + (kRoot / "a" / "data" / "config.json").string() + " --out " + (kRoot / "d").string()) == 0);
  CHECK(tree(kRoot / "d" / "data") == a);
}

TEST_CASE_FIXTURE(Fixture, "stages write namespaced outputs and augment reports seven stages") {
  const auto out = kRoot / "run";
  for (const char* stage : {"gen-data", "train-dyn", "train-diff", "train-pred", "finetune", "generate", "augment"}) {
    INFO(stage);
    REQUIRE(run(std::string(stage) + " " + config_args(out, 21)) == 0);
  }
  for (const char* d : {"data", "dynamics", "denoiser", "predictor", "finetune", "generate", "augment"}) {
    INFO(d);
    CHECK(fs::exists(out / d / "config.json"));
  }
  CHECK(fs::exists(out / "dynamics" / "model.ckpt"));
  CHECK(fs::exists(out / "denoiser" / "model.ckpt"));
  CHECK(fs::exists(out / "predictor" / "predictions.csv"));
  CHECK(fs::exists(out / "generate" / "samples.csv"));
  CHECK(fs::exists(out / "cache"));

  const auto report = nlohmann::json::parse(slurp(out / "augment" / "report.json"));
  REQUIRE(report["stages"].size() == 7);
  for (int k = 0; k < 7; ++k) CHECK(report["stages"][k]["stage"] == k + 1);
  CHECK(report["stages"][6]["name"] == "retrain");

  std::istringstream pred(slurp(out / "augment" / "predictions.csv"));
  std::string line;
  std::getline(pred, line);
  CHECK(line == "id,probability,predicted,label");
  int rows = 0;
  while (std::getline(pred, line)) ++rows;
  CHECK(rows == 8);
}

TEST_CASE_FIXTURE(Fixture, "theory output matches the library") {
  const auto out = kRoot / "th";
  REQUIRE(run("gen-data " + config_args(out, 5)) == 0);
  REQUIRE(run("theory " + config_args(out, 5)) == 0);
  const auto data = dataset::load_dataset(out / "data");
  const double beta_crit = theory::bifurcation_point(data.provenance.dynamics);

  std::map<std::int64_t, const dataset::NetworkSample*> by_id;
  for (const auto* pool : {&data.labeled, &data.unlabeled, &data.validation, &data.test})
    for (const auto& s : *pool) by_id[s.id] = &s;

  std::istringstream csv(slurp(out / "theory" / "beta_eff.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "id,pool,beta_eff,theory_label,label");
  std::size_t rows = 0;
  while (std::getline(csv, line)) {
    std::istringstream row(line);
    std::string id, pool, beta, label;
    std::getline(row, id, ',');
    std::getline(row, pool, ',');
    std::getline(row, beta, ',');
    std::getline(row, label, ',');
    const auto& s = *by_id.at(std::stoll(id));
    CHECK(std::stod(beta) == doctest::Approx(theory::beta_eff_or_zero(s.graph)).epsilon(1e-7));
    CHECK(std::stoi(label) == dynsim::as_int(theory::theory_predict(s.graph, beta_crit)));
    ++rows;
  }
  CHECK(rows == by_id.size());
  const auto summary = nlohmann::json::parse(slurp(out / "theory" / "summary.json"));
  CHECK(summary["beta_crit"].get<double>() == doctest::Approx(beta_crit));
}

TEST_CASE_FIXTURE(Fixture, "bad configs exit nonzero and name the path") {
  std::ofstream(kRoot / "bad.json") << R"({"schema_version": 1, "augment": {"guidance": {"lamda": 1}}})";
  CHECK(run("gen-data --config " + (kRoot / "bad.json").string() + " --out " + (kRoot / "x").string()) == 2);
  CHECK(slurp(kRoot / "last.log").find("/augment/guidance/lamda") != std::string::npos);
  CHECK(!fs::exists(kRoot / "x" / "data"));

  CHECK(run("train-dyn --out " + (kRoot / "empty").string()) == 1);
  CHECK(slurp(kRoot / "last.log").find("gen-data") != std::string::npos);
  CHECK(run("no-such-command") != 0);
}
