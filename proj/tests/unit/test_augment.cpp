#include <doctest.h>

#include <filesystem>
#include <string>

#include "tdnetgen/augment.hpp"
#include "tdnetgen/error.hpp"

using namespace tdnetgen;
using namespace tdnetgen::augment;
namespace fs = std::filesystem;

namespace {

PipelineConfig tiny() {
  auto c = desk_config();
  c.n_per_class = 4;
  c.diffusion_steps = 10;
  c.guidance.stride = 2;
  c.denoiser = {1, 2, 8, 4, 4, 2};
  c.denoiser_train.epochs = 2;
  c.dynamics.d_hidden = 8;
  c.dynamics_train.epochs = 2;
  c.predictor.d_embed = 8;
  c.predictor.heads = 2;
  c.predictor.encoder_layers = 1;
  for (auto* t : {&c.predictor_train, &c.finetune, &c.retrain}) {
    t->epochs = 2;
    t->patience = 2;
  }
  return c;
}

std::string error_of(const nlohmann::json& j) {
  try {
    pipeline_from_json(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("pipeline config survives a JSON round trip") {
  auto c = tiny();
  c.guidance.lambda = 12.5;
  c.no_finetune = true;
  c.seed = 99;
  const auto j = to_json(c);
  CHECK(to_json(pipeline_from_json(j)) == j);
  CHECK(to_json(pipeline_from_json(nlohmann::json::object())) == to_json(desk_config()));
}

TEST_CASE("config errors name the offending path") {
  CHECK(error_of({{"guidance", {{"lamda", 3}}}}).find("/augment/guidance/lamda") != std::string::npos);
  CHECK(error_of({{"n_per_class", "ten"}}).find("/augment/n_per_class") != std::string::npos);
  CHECK(error_of({{"use_fraction", 1.5}}).find("use_fraction") != std::string::npos);
  CHECK(error_of({{"guidance", {{"lambda", -1}}}}).find("lambda") != std::string::npos);
}

TEST_CASE("the seven stages run and artifacts are reused across variants") {
  netgen::TopologySpec ts;
  ts.n_nodes = {20, 24};
  const auto data = dataset::build_dataset(ts, {}, {}, {}, {16, 12, 8, 8}, 6, 21);
  const auto dir = fs::temp_directory_path() / "tdnetgen_augment_test";
  fs::remove_all(dir);

  auto cfg = tiny();
  const auto first = run_pipeline(data, cfg, dir);
  const auto& stages = first.report.at("stages");
  REQUIRE(stages.size() == 7u);
  for (std::size_t k = 0; k < 7; ++k) CHECK(stages[k].at("name") == kStageNames[k]);
  CHECK(first.generated.size() == 8u);
  CHECK(first.used.size() == 4u);
  int resilient = 0;
  for (const auto& s : first.generated) {
    CHECK(s.label_source == dataset::LabelSource::GUIDED);
    CHECK(s.id >= 1000000);
    resilient += s.label == dynsim::Resilience::RESILIENT;
  }
  CHECK(resilient == 4);
  for (const auto& s : first.used) CHECK(s.label.has_value());

  const auto again = run_pipeline(data, cfg, dir);
  for (std::size_t k = 0; k < 5; ++k) CHECK(again.report["stages"][k].value("reused", false));
  CHECK(again.final_test.f1 == first.final_test.f1);

  cfg.no_guidance = true;
  const auto ablated = run_pipeline(data, cfg, dir);
  const auto& st = ablated.report["stages"];
  for (std::size_t k = 0; k < 4; ++k) CHECK(st[k].value("reused", false));
  CHECK_FALSE(st[4].value("reused", true));
  for (const auto& s : ablated.generated) CHECK(s.label_source == dataset::LabelSource::PSEUDO);
  fs::remove_all(dir);
}
