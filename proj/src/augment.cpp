#include "tdnetgen/augment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include "tdnetgen/checkpoint.hpp"
#include "tdnetgen/error.hpp"
#include "tdnetgen/json_reader.hpp"
#include "tdnetgen/log.hpp"
#include "tdnetgen/random.hpp"
#include "tdnetgen/spec_json.hpp"

namespace tdnetgen::augment {

namespace fs = std::filesystem;
using nlohmann::json;

void PipelineConfig::validate() const {
  if (n_per_class < 1) throw ConfigError("/augment/n_per_class: must be >= 1");
  if (!(use_fraction > 0.0 && use_fraction <= 1.0)) throw ConfigError("/augment/use_fraction: must lie in (0, 1]");
  if (diffusion_steps < 1) throw ConfigError("/augment/diffusion_steps: must be >= 1");
  guidance.validate();
  for (const auto* t : {&predictor_train, &finetune, &retrain})
    if (t->epochs < 1 || t->batch_size < 1 || !(t->lr > 0.0) || t->patience < 1)
      throw ConfigError("/augment: predictor training needs epochs, batch_size, patience >= 1 and lr > 0");
  if (dynamics_train.epochs < 1 || dynamics_train.batch_size < 1 || !(dynamics_train.lr > 0.0))
    throw ConfigError("/augment/dynamics_train: epochs, batch_size >= 1 and lr > 0 required");
  if (denoiser_train.epochs < 1 || denoiser_train.batch_size < 1 || !(denoiser_train.lr > 0.0))
    throw ConfigError("/augment/denoiser_train: epochs, batch_size >= 1 and lr > 0 required");
}

PipelineConfig desk_config() {
  PipelineConfig c;
  c.n_per_class = 100;
  c.use_fraction = 0.5;
  c.guidance.lambda = 2000.0;
  c.guidance.stride = 5;
  c.guidance.through_dynamics = true;
  c.diffusion_steps = 200;
  c.denoiser.layers = 3;
  c.denoiser.heads = 4;
  c.denoiser.d_node = 32;
  c.denoiser.d_edge = 16;
  c.denoiser.d_time = 16;
  c.denoiser_train.epochs = 80;
  c.denoiser_train.batch_size = 16;
  c.denoiser_train.lr = 2e-3;
  c.dynamics.d_hidden = 32;
  c.dynamics.gnn_layers = 2;
  c.dynamics_train.epochs = 30;
  c.dynamics_train.batch_size = 16;
  c.dynamics_train.lr = 3e-3;
  c.predictor.d_embed = 32;
  c.predictor.heads = 4;
  c.predictor_train.epochs = 150;
  c.predictor_train.batch_size = 16;
  c.predictor_train.lr = 1e-3;
  c.predictor_train.patience = 40;
  c.finetune = c.predictor_train;
  c.finetune.epochs = 40;
  c.finetune.lr = 3e-4;
  c.finetune.patience = 20;
  c.retrain = c.predictor_train;
  c.retrain.epochs = 60;
  c.retrain.lr = 5e-4;
  c.retrain.patience = 25;
  return c;
}

namespace {

json train_json(const predictor::PredictorTrainConfig& t) {
  return {{"epochs", t.epochs}, {"batch_size", t.batch_size}, {"lr", t.lr},
          {"weight_decay", t.weight_decay}, {"patience", t.patience}};
}

void read_train(JsonReader r, predictor::PredictorTrainConfig& t) {
  r.get("epochs", t.epochs);
  r.get("batch_size", t.batch_size);
  r.get("lr", t.lr);
  r.get("weight_decay", t.weight_decay);
  r.get("patience", t.patience);
  r.finish();
}

}  // namespace

json to_json(const PipelineConfig& c) {
  return {{"n_per_class", c.n_per_class},
          {"use_fraction", c.use_fraction},
          {"guidance",
           {{"lambda", c.guidance.lambda},
            {"stride", c.guidance.stride},
            {"through_dynamics", c.guidance.through_dynamics}}},
          {"no_guidance", c.no_guidance},
          {"no_finetune", c.no_finetune},
          {"labeled_only_dynlearn", c.labeled_only_dynlearn},
          {"seed", c.seed},
          {"diffusion_steps", c.diffusion_steps},
          {"denoiser",
           {{"layers", c.denoiser.layers},
            {"heads", c.denoiser.heads},
            {"d_node", c.denoiser.d_node},
            {"d_edge", c.denoiser.d_edge},
            {"d_time", c.denoiser.d_time},
            {"ffn_mult", c.denoiser.ffn_mult}}},
          {"denoiser_train",
           {{"epochs", c.denoiser_train.epochs},
            {"batch_size", c.denoiser_train.batch_size},
            {"lr", c.denoiser_train.lr},
            {"weight_decay", c.denoiser_train.weight_decay},
            {"val_fraction", c.denoiser_train.val_fraction}}},
          {"dynamics", {{"d_hidden", c.dynamics.d_hidden}, {"gnn_layers", c.dynamics.gnn_layers}}},
          {"dynamics_train",
           {{"epochs", c.dynamics_train.epochs},
            {"batch_size", c.dynamics_train.batch_size},
            {"lr", c.dynamics_train.lr},
            {"smooth_l1", c.dynamics_train.smooth_l1}}},
          {"predictor",
           {{"d_embed", c.predictor.d_embed},
            {"heads", c.predictor.heads},
            {"encoder_layers", c.predictor.encoder_layers},
            {"gcn_layers", c.predictor.gcn_layers},
            {"max_time", c.predictor.max_time},
            {"attn_hidden", c.predictor.attn_hidden}}},
          {"predictor_train", train_json(c.predictor_train)},
          {"finetune", train_json(c.finetune)},
          {"retrain", train_json(c.retrain)}};
}

PipelineConfig pipeline_from_json(const json& j, PipelineConfig c) {
  JsonReader r(j, "/augment");
  r.get("n_per_class", c.n_per_class);
  r.get("use_fraction", c.use_fraction);
  {
    auto g = r.child("guidance");
    g.get("lambda", c.guidance.lambda);
    g.get("stride", c.guidance.stride);
    g.get("through_dynamics", c.guidance.through_dynamics);
    g.finish();
  }
  r.get("no_guidance", c.no_guidance);
  r.get("no_finetune", c.no_finetune);
  r.get("labeled_only_dynlearn", c.labeled_only_dynlearn);
  r.get("seed", c.seed);
  r.get("diffusion_steps", c.diffusion_steps);
  {
    auto d = r.child("denoiser");
    d.get("layers", c.denoiser.layers);
    d.get("heads", c.denoiser.heads);
    d.get("d_node", c.denoiser.d_node);
    d.get("d_edge", c.denoiser.d_edge);
    d.get("d_time", c.denoiser.d_time);
    d.get("ffn_mult", c.denoiser.ffn_mult);
    d.finish();
  }
  {
    auto d = r.child("denoiser_train");
    d.get("epochs", c.denoiser_train.epochs);
    d.get("batch_size", c.denoiser_train.batch_size);
    d.get("lr", c.denoiser_train.lr);
    d.get("weight_decay", c.denoiser_train.weight_decay);
    d.get("val_fraction", c.denoiser_train.val_fraction);
    d.finish();
  }
  {
    auto d = r.child("dynamics");
    d.get("d_hidden", c.dynamics.d_hidden);
    d.get("gnn_layers", c.dynamics.gnn_layers);
    d.finish();
  }
  {
    auto d = r.child("dynamics_train");
    d.get("epochs", c.dynamics_train.epochs);
    d.get("batch_size", c.dynamics_train.batch_size);
    d.get("lr", c.dynamics_train.lr);
    d.get("smooth_l1", c.dynamics_train.smooth_l1);
    d.finish();
  }
  {
    auto d = r.child("predictor");
    d.get("d_embed", c.predictor.d_embed);
    d.get("heads", c.predictor.heads);
    d.get("encoder_layers", c.predictor.encoder_layers);
    d.get("gcn_layers", c.predictor.gcn_layers);
    d.get("max_time", c.predictor.max_time);
    d.get("attn_hidden", c.predictor.attn_hidden);
    d.finish();
  }
  read_train(r.child("predictor_train"), c.predictor_train);
  read_train(r.child("finetune"), c.finetune);
  read_train(r.child("retrain"), c.retrain);
  r.finish();
  c.validate();
  return c;
}

std::string stage_key(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return log::strf("%016llx", static_cast<unsigned long long>(h));
}

std::vector<NetworkSample> label_generated(predictor::Predictor& model, std::vector<NetworkSample> samples) {
  if (samples.empty()) return samples;
  const auto labels = predictor::predict_labels(model, samples);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    samples[k].label = dynsim::resilience_from_int(labels[k]);
    samples[k].label_source = dataset::LabelSource::PSEUDO;
  }
  return samples;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

json metrics_json(const eval::Metrics& m) {
  return {{"f1", m.f1}, {"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall}};
}

eval::Metrics test_metrics(predictor::Predictor& model, const std::vector<NetworkSample>& test) {
  std::vector<int> y;
  for (const auto& s : test) y.push_back(dynsim::as_int(s.label.value()));
  return eval::compute_metrics(predictor::predict_labels(model, test), y);
}

/// Input fingerprint of the dataset: its provenance pins every sample.
std::string data_key(const DatasetSplit& data) {
  json j = {{"topology", data.provenance.topology}, {"dynamics", data.provenance.dynamics},
            {"sim", data.provenance.sim},           {"rule", data.provenance.rule},
            {"counts", data.provenance.counts},     {"t_obs", data.provenance.t_obs},
            {"seed", data.provenance.seed},         {"n_labeled", data.labeled.size()},
            {"n_unlabeled", data.unlabeled.size()}};
  return j.dump();
}

class Artifacts {
 public:
  explicit Artifacts(fs::path dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) fs::create_directories(dir_);
  }
  bool enabled() const { return !dir_.empty(); }
  fs::path file(const std::string& stage, const std::string& key, const std::string& ext) const {
    return dir_ / (stage + "-" + stage_key(key) + ext);
  }

 private:
  fs::path dir_;
};

std::vector<int> sample_sizes(const std::vector<NetworkSample>& pool, int count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<int> out;
  for (int k = 0; k < count; ++k)
    out.push_back(pool[uniform_int(rng, 0, static_cast<int>(pool.size()) - 1)].graph.n_nodes());
  return out;
}

}  // namespace

dynlearn::TrainedDynamics stage_train_dynamics(const DatasetSplit& data, const PipelineConfig& cfg) {
  auto tc = cfg.dynamics_train;
  tc.labeled_only = cfg.labeled_only_dynlearn;
  tc.seed = derive_seed(cfg.seed, 1);
  return dynlearn::train_dynlearn(data.labeled, data.unlabeled, data.provenance.sim.dt, cfg.dynamics, tc);
}

std::vector<netgen::Graph> training_topologies(const DatasetSplit& data) {
  std::vector<netgen::Graph> out;
  for (const auto* pool : {&data.labeled, &data.unlabeled})
    for (const auto& s : *pool) out.push_back(s.graph);
  return out;
}

diffusion::TrainedDenoiser stage_train_denoiser(const DatasetSplit& data, const PipelineConfig& cfg) {
  const auto topologies = training_topologies(data);
  const auto schedule = diffusion::NoiseSchedule::cosine(cfg.diffusion_steps, diffusion::mean_edge_density(topologies));
  auto tc = cfg.denoiser_train;
  tc.seed = derive_seed(cfg.seed, 2);
  return diffusion::train_denoiser(topologies, schedule, cfg.denoiser, tc);
}

predictor::PredictorConfig predictor_config(const DatasetSplit& data, const PipelineConfig& cfg) {
  auto c = cfg.predictor;
  c.n_traj = static_cast<int>(dynsim::default_init_rules(data.provenance.dynamics.family).size());
  return c;
}

predictor::TrainedPredictor stage_train_vanilla(const DatasetSplit& data, const PipelineConfig& cfg) {
  auto tc = cfg.predictor_train;
  tc.seed = derive_seed(cfg.seed, 3);
  return predictor::train_predictor(predictor_config(data, cfg), data.labeled, data.validation, tc);
}

predictor::TrainedPredictor stage_finetune(const predictor::Predictor& vanilla, const DatasetSplit& data,
                                           dynlearn::DynamicsNet& dynamics, const PipelineConfig& cfg) {
  auto tc = cfg.finetune;
  tc.seed = derive_seed(cfg.seed, 4);
  const auto rules = dynsim::default_init_rules(data.provenance.dynamics.family);
  return predictor::finetune_predictor(vanilla, data.labeled, data.validation, dynamics, rules, data.provenance.sim,
                                       tc);
}

std::vector<NetworkSample> stage_generate(const diffusion::Denoiser& denoiser, const diffusion::NoiseSchedule& schedule,
                                          predictor::Predictor& guide, dynlearn::DynamicsNet& dynamics,
                                          const DatasetSplit& data, const PipelineConfig& cfg) {
  cfg.validate();
  const auto rules = dynsim::default_init_rules(data.provenance.dynamics.family);
  const auto& sim = data.provenance.sim;
  const int t_obs = data.labeled.front().obs.n_time;
  const auto sizes = sample_sizes(data.unlabeled.empty() ? data.labeled : data.unlabeled, 2 * cfg.n_per_class,
                                  derive_seed(cfg.seed, 5));
  auto edge_pred = diffusion::make_edge_predictor(denoiser, schedule);
  std::vector<std::pair<netgen::Graph, std::optional<dynsim::Resilience>>> graphs;
  if (cfg.no_guidance) {
    for (auto& g : diffusion::sample_unconditional(edge_pred, schedule, sizes, derive_seed(cfg.seed, 6)))
      graphs.emplace_back(std::move(g), std::nullopt);
  } else {
    guidance::TrajectorySource source{&dynamics, rules, sim, t_obs};
    int k = 0;
    for (auto target : {dynsim::Resilience::RESILIENT, dynsim::Resilience::NON_RESILIENT}) {
      std::vector<int> part(sizes.begin() + k * cfg.n_per_class, sizes.begin() + (k + 1) * cfg.n_per_class);
      for (auto& gs :
           guidance::sample_conditional(edge_pred, schedule, guide, source, part, target, cfg.guidance,
                                        derive_seed(cfg.seed, 7, k)))
        graphs.emplace_back(std::move(gs.graph), gs.intended);
      ++k;
    }
  }
  std::vector<NetworkSample> out;
  for (std::size_t k = 0; k < graphs.size(); ++k) {
    NetworkSample s;
    s.id = kFirstGeneratedId + static_cast<std::int64_t>(k);
    s.graph = graphs[k].first;
    s.obs = dynlearn::generate_trajectories(dynamics, s.graph, rules, sim, t_obs, derive_seed(cfg.seed, 8, k));
    if (graphs[k].second) {
      s.label = graphs[k].second;
      s.label_source = dataset::LabelSource::GUIDED;
    }
    out.push_back(std::move(s));
  }
  if (cfg.no_guidance) out = label_generated(guide, std::move(out));
  return out;
}

std::vector<NetworkSample> stage_subsample(const std::vector<NetworkSample>& generated, const PipelineConfig& cfg) {
  std::map<int, std::vector<const NetworkSample*>> by_class;
  for (const auto& s : generated) {
    if (!s.label) throw DomainError("subsample: generated sample " + std::to_string(s.id) + " has no label");
    by_class[dynsim::as_int(*s.label)].push_back(&s);
  }
  Rng rng(derive_seed(cfg.seed, 9));
  std::vector<NetworkSample> used;
  for (auto& [label, group] : by_class) {
    std::shuffle(group.begin(), group.end(), rng);
    const auto keep = static_cast<std::size_t>(std::lround(cfg.use_fraction * group.size()));
    for (std::size_t k = 0; k < keep; ++k) used.push_back(*group[k]);
  }
  std::sort(used.begin(), used.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return used;
}

predictor::TrainedPredictor stage_retrain(const predictor::Predictor& vanilla, const DatasetSplit& data,
                                          const std::vector<NetworkSample>& used, const PipelineConfig& cfg) {
  std::vector<NetworkSample> train = data.labeled;
  train.insert(train.end(), used.begin(), used.end());
  auto tc = cfg.retrain;
  tc.seed = derive_seed(cfg.seed, 10);
  return predictor::train_predictor(predictor_config(data, cfg), train, data.validation, tc, &vanilla);
}

PipelineResult run_pipeline(const DatasetSplit& data, const PipelineConfig& cfg, const fs::path& artifacts_dir) {
  cfg.validate();
  if (data.labeled.empty() || data.validation.empty() || data.test.empty())
    throw DomainError("run_pipeline: labeled, validation and test pools must be nonempty");
  Artifacts art(artifacts_dir);
  const auto& sim = data.provenance.sim;
  const std::string dkey = data_key(data);
  const json cj = to_json(cfg);
  PipelineResult out;
  json stages = json::array();

  auto run_stage = [&](int index, auto&& body) {
    const auto t0 = Clock::now();
    json entry = {{"stage", index + 1}, {"name", kStageNames[index]}};
    try {
      body(entry);
    } catch (const Error& e) {
      throw Error(std::string("stage ") + kStageNames[index] + ": " + e.what());
    } catch (const c10::Error& e) {
      throw Error(std::string("stage ") + kStageNames[index] + ": " + e.what_without_backtrace());
    }
    entry["seconds"] = seconds_since(t0);
    log::info(log::strf("stage %d %s done in %.1f s", index + 1, kStageNames[index], entry["seconds"].get<double>()));
    stages.push_back(entry);
  };

  // 1. Dynamics learner on P u Q (or P alone).
  const std::string dyn_key = dkey + cj["dynamics"].dump() + cj["dynamics_train"].dump() +
                              std::to_string(cfg.labeled_only_dynlearn) + std::to_string(cfg.seed);
  run_stage(0, [&](json& e) {
    const auto path = art.file("dynamics", dyn_key, ".ckpt");
    int n_trained = cfg.labeled_only_dynlearn ? static_cast<int>(data.labeled.size())
                                              : static_cast<int>(data.labeled.size() + data.unlabeled.size());
    if (art.enabled() && fs::exists(path)) {
      out.dynamics = checkpoint::load_dynamics(path);
      e["reused"] = true;
    } else {
      auto trained = stage_train_dynamics(data, cfg);
      out.dynamics = trained.model;
      n_trained = trained.n_trained_samples;
      e["final_loss"] = trained.loss.back();
      e["reused"] = false;
      if (art.enabled()) checkpoint::save_dynamics(path, out.dynamics);
    }
    e["n_trained_samples"] = n_trained;
    e["labeled_only"] = cfg.labeled_only_dynlearn;
    e["validation_l1"] = dynlearn::mean_l1_gap(out.dynamics, data.validation, sim.dt);
    e["persistence_l1"] = dynlearn::persistence_l1_gap(data.validation);
  });

  // 2. Denoiser on all training topologies.
  diffusion::Denoiser denoiser{nullptr};
  diffusion::NoiseSchedule schedule;
  const std::string diff_key = dkey + cj["denoiser"].dump() + cj["denoiser_train"].dump() +
                               std::to_string(cfg.diffusion_steps) + std::to_string(cfg.seed);
  run_stage(1, [&](json& e) {
    const auto path = art.file("denoiser", diff_key, ".ckpt");
    if (art.enabled() && fs::exists(path)) {
      auto loaded = checkpoint::load_denoiser(path);
      denoiser = loaded.model;
      schedule = loaded.schedule;
      e["reused"] = true;
    } else {
      auto trained = stage_train_denoiser(data, cfg);
      denoiser = trained.model;
      schedule = trained.schedule;
      e["best_val_loss"] = trained.best_val_loss;
      e["reused"] = false;
      if (art.enabled()) checkpoint::save_denoiser(path, denoiser, schedule);
    }
    e["n_graphs"] = data.labeled.size() + data.unlabeled.size();
    e["target_density"] = schedule.density();
  });

  // 3. Vanilla predictor on P.
  const std::string van_key = dkey + cj["predictor"].dump() + cj["predictor_train"].dump() + std::to_string(cfg.seed);
  run_stage(2, [&](json& e) {
    const auto path = art.file("vanilla", van_key, ".ckpt");
    if (art.enabled() && fs::exists(path)) {
      out.vanilla = checkpoint::load_predictor(path);
      e["reused"] = true;
    } else {
      auto trained = stage_train_vanilla(data, cfg);
      out.vanilla = trained.model;
      e["best_epoch"] = trained.best_epoch;
      e["reused"] = false;
      if (art.enabled()) checkpoint::save_predictor(path, out.vanilla);
    }
    out.vanilla_test = test_metrics(out.vanilla, data.test);
    e["test"] = metrics_json(out.vanilla_test);
  });

  // 4. Fine-tune on learned trajectories of the labeled topologies.
  const std::string ft_key = van_key + dyn_key + cj["finetune"].dump();
  run_stage(3, [&](json& e) {
    e["skipped"] = cfg.no_finetune;
    if (cfg.no_finetune) {
      out.guide = out.vanilla;
      return;
    }
    const auto path = art.file("finetuned", ft_key, ".ckpt");
    if (art.enabled() && fs::exists(path)) {
      out.guide = checkpoint::load_predictor(path);
      e["reused"] = true;
    } else {
      auto tuned = stage_finetune(out.vanilla, data, out.dynamics, cfg);
      out.guide = tuned.model;
      e["best_val_f1_learned"] = tuned.best_val_f1;
      e["reused"] = false;
      if (art.enabled()) checkpoint::save_predictor(path, out.guide);
    }
    e["n_topologies"] = data.labeled.size();
    e["test"] = metrics_json(test_metrics(out.guide, data.test));
  });

  // 5. Generation: guided per class, or unconditional + predictor labels.
  const std::string gen_key = (cfg.no_finetune ? van_key : ft_key) + diff_key + std::to_string(cfg.no_guidance) +
                              cj["guidance"].dump() + std::to_string(cfg.n_per_class);
  run_stage(4, [&](json& e) {
    const auto dir = art.file("generated", gen_key, "");
    if (art.enabled() && fs::exists(dir / "manifest.json")) {
      out.generated = dataset::load_samples(dir);
      e["reused"] = true;
    } else {
      out.generated = stage_generate(denoiser, schedule, out.guide, out.dynamics, data, cfg);
      e["reused"] = false;
      if (art.enabled()) dataset::save_samples(out.generated, dir, "generated");
    }
    e.update(generation_summary(out.generated, cfg.no_guidance ? nullptr : &out.guide));
  });

  // 6. Keep a random fraction of each class.
  run_stage(5, [&](json& e) {
    out.used = stage_subsample(out.generated, cfg);
    e["fraction"] = cfg.use_fraction;
    e["n_used"] = out.used.size();
  });

  // 7. Retrain from the vanilla weights on P plus the generated subset.
  run_stage(6, [&](json& e) {
    auto trained = stage_retrain(out.vanilla, data, out.used, cfg);
    out.final_model = trained.model;
    out.final_test = test_metrics(out.final_model, data.test);
    e["n_train"] = data.labeled.size() + out.used.size();
    e["best_epoch"] = trained.best_epoch;
    e["best_val_f1"] = trained.best_val_f1;
    e["test"] = metrics_json(out.final_test);
  });

  out.report = {{"config", cj},
                {"stages", stages},
                {"test", {{"vanilla", metrics_json(out.vanilla_test)}, {"augmented", metrics_json(out.final_test)}}}};
  return out;
}

json generation_summary(const std::vector<NetworkSample>& generated, predictor::Predictor* guide) {
  int resilient = 0;
  double density = 0.0;
  for (const auto& s : generated) {
    resilient += s.label == dynsim::Resilience::RESILIENT;
    const double n = s.graph.n_nodes();
    density += n > 1 ? s.graph.n_edges() / (0.5 * n * (n - 1.0)) : 0.0;
  }
  json e = {{"n_generated", generated.size()},
            {"n_resilient", resilient},
            {"mean_density", generated.empty() ? 0.0 : density / generated.size()},
            {"guided", guide != nullptr}};
  if (guide && !generated.empty()) {
    // Agreement of the guiding predictor with the intended labels.
    const auto pred = predictor::predict_labels(*guide, generated);
    int agree = 0;
    for (std::size_t k = 0; k < pred.size(); ++k) agree += pred[k] == dynsim::as_int(generated[k].label.value());
    e["intended_agreement"] = static_cast<double>(agree) / generated.size();
  }
  return e;
}

}  // namespace tdnetgen::augment
