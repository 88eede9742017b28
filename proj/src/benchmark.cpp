#include "tdnetgen/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tdnetgen/error.hpp"
#include "tdnetgen/log.hpp"
#include "tdnetgen/plot.hpp"

namespace tdnetgen::eval {

using nlohmann::json;

namespace {

std::vector<int> test_labels(const dataset::DatasetSplit& data) {
  std::vector<int> y;
  y.reserve(data.test.size());
  for (const auto& s : data.test) y.push_back(dynsim::as_int(s.label.value()));
  return y;
}

Metrics evaluate(predictor::Predictor& model, const dataset::DatasetSplit& data) {
  return compute_metrics(predictor::predict_labels(model, data.test), test_labels(data));
}

dataset::DatasetSplit build(const ExperimentConfig& cfg, std::uint64_t seed) {
  return dataset::build_dataset(cfg.topology, cfg.dynamics, cfg.sim, cfg.rule, cfg.counts, cfg.t_obs, seed);
}

json metrics_json(const Metrics& m) {
  return {{"f1", m.f1}, {"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall}};
}

std::vector<MetricReport> group(const std::vector<SeedResult>& rows) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<Metrics>> by;
  for (const auto& r : rows) {
    if (!by.count(r.method)) order.push_back(r.method);
    by[r.method].push_back(r.test);
  }
  std::vector<MetricReport> out;
  for (const auto& m : order) out.push_back(summarize(m, by[m]));
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw ConfigError("/seeds: at least one seed required");
  if (t_obs < 2) throw ConfigError("/t_obs: must be >= 2");
  if (counts.n_unlabeled < 1 || counts.n_labeled < 1 || counts.n_val < 1 || counts.n_test < 1)
    throw ConfigError("/counts: every pool needs at least one sample");
  if (self_train.n_pseudo < 0 || self_train.rounds < 1) throw ConfigError("/self_train: invalid counts");
  pipeline.validate();
}

std::vector<SeedResult> run_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const auto data = build(cfg, seed);
  auto p = cfg.pipeline;
  p.seed = seed;
  std::vector<SeedResult> out;

  log::info(log::strf("seed %llu: full pipeline", static_cast<unsigned long long>(seed)));
  auto full = augment::run_pipeline(data, p, cfg.cache);
  const int n_added = static_cast<int>(full.used.size());
  out.push_back({kVanilla, seed, full.vanilla_test, 0, {}});

  auto train = p.retrain;
  train.seed = seed;
  {
    auto st = cfg.self_train;
    st.n_pseudo = std::min<int>(n_added, static_cast<int>(data.unlabeled.size()));
    auto r = baselines::self_train(full.vanilla, data.labeled, data.unlabeled, data.validation, st, train,
                                   data.provenance.audit_labels);
    json d = json::object();
    if (r.pseudo_error_rate) d["pseudo_error_rate"] = *r.pseudo_error_rate;
    out.push_back({kSelfTrain, seed, evaluate(r.model, data), static_cast<int>(r.pseudo.size()), d});
  }
  {
    auto r = baselines::theory_augment(full.vanilla, data.labeled, data.unlabeled, data.validation, n_added, train);
    out.push_back({kTheory, seed, evaluate(r.model, data), static_cast<int>(r.added.size()), {}});
  }
  out.push_back({kFull, seed, full.final_test, n_added, full.report});

  auto variant = [&](const char* name, auto&& tweak) {
    auto q = p;
    tweak(q);
    log::info(log::strf("seed %llu: %s", static_cast<unsigned long long>(seed), name));
    auto r = augment::run_pipeline(data, q, cfg.cache);
    out.push_back({name, seed, r.final_test, static_cast<int>(r.used.size()), r.report});
  };
  variant(kNoTrajectories, [](auto& q) { q.labeled_only_dynlearn = true; });
  if (cfg.ablations) {
    variant(kNoGuidance, [](auto& q) { q.no_guidance = true; });
    variant(kNoFinetune, [](auto& q) { q.no_finetune = true; });
  }
  return out;
}

BenchmarkResult run_benchmark(const ExperimentConfig& cfg) {
  cfg.validate();
  BenchmarkResult out;
  for (auto seed : cfg.seeds) {
    auto rows = run_seed(cfg, seed);
    out.per_seed.insert(out.per_seed.end(), rows.begin(), rows.end());
  }
  out.rows = group(out.per_seed);
  return out;
}

std::string per_seed_table(const std::vector<SeedResult>& rows) {
  std::string out = "method,seed,f1,accuracy,precision,recall,n_added\n";
  for (const auto& r : rows)
    out += log::strf("%s,%llu,%.6f,%.6f,%.6f,%.6f,%d\n", r.method.c_str(), static_cast<unsigned long long>(r.seed),
                     r.test.f1, r.test.accuracy, r.test.precision, r.test.recall, r.n_added);
  return out;
}

void write_benchmark(const BenchmarkResult& result, const std::filesystem::path& dir) {
  write_text(dir / "summary.csv", summary_table(result.rows));
  write_text(dir / "per_seed.csv", per_seed_table(result.per_seed));
  std::vector<Bar> bars;
  for (const auto& r : result.rows) bars.push_back({r.tag, r.f1_mean, r.f1_std});
  write_text(dir / "f1.svg", bar_chart_svg("Test F1 (mean and std over seeds)", "F1", bars));
  json runs = json::array();
  for (const auto& r : result.per_seed)
    runs.push_back({{"method", r.method},
                    {"seed", r.seed},
                    {"test", metrics_json(r.test)},
                    {"n_added", r.n_added},
                    {"details", r.details}});
  json rows = json::array();
  for (const auto& r : result.rows)
    rows.push_back({{"method", r.tag},
                    {"f1_mean", r.f1_mean},
                    {"f1_std", r.f1_std},
                    {"accuracy_mean", r.accuracy_mean},
                    {"accuracy_std", r.accuracy_std},
                    {"f1", r.f1},
                    {"accuracy", r.accuracy}});
  write_text(dir / "report.json", json{{"summary", rows}, {"runs", runs}}.dump(1) + "\n");
}

SweepAxis parse_sweep_axis(const std::string& name) {
  if (name == "n_labeled") return SweepAxis::N_LABELED;
  if (name == "t_obs") return SweepAxis::T_OBS;
  if (name == "n_generated") return SweepAxis::N_GENERATED;
  throw ConfigError("sweep axis must be one of n_labeled, t_obs, n_generated (got '" + name + "')");
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::N_LABELED: return "n_labeled";
    case SweepAxis::T_OBS: return "t_obs";
    case SweepAxis::N_GENERATED: return "n_generated";
  }
  return "?";
}

std::vector<SweepPoint> sweep(SweepAxis axis, const std::vector<double>& values, const ExperimentConfig& cfg) {
  if (values.empty()) throw ConfigError("sweep: no values");
  std::vector<SweepPoint> out;
  for (double v : values) {
    if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError("sweep: values must be positive integers");
    auto c = cfg;
    const int k = static_cast<int>(v);
    switch (axis) {
      case SweepAxis::N_LABELED: c.counts.n_labeled = k; break;
      case SweepAxis::T_OBS: c.t_obs = k; break;
      case SweepAxis::N_GENERATED:
        if (k % 2) throw ConfigError("sweep: n_generated values must be even");
        c.pipeline.n_per_class = k / 2;
        break;
    }
    c.validate();
    std::vector<Metrics> van, aug;
    for (auto seed : c.seeds) {
      const auto data = build(c, seed);
      auto p = c.pipeline;
      p.seed = seed;
      log::info(log::strf("sweep %s=%d seed %llu", to_string(axis).c_str(), k, static_cast<unsigned long long>(seed)));
      auto r = augment::run_pipeline(data, p, c.cache);
      van.push_back(r.vanilla_test);
      aug.push_back(r.final_test);
    }
    out.push_back({v, summarize(kVanilla, van), summarize(kFull, aug)});
  }
  return out;
}

void write_sweep(SweepAxis axis, const std::vector<SweepPoint>& points, const std::filesystem::path& dir) {
  const auto name = to_string(axis);
  std::string csv = "axis,value,method,f1_mean,f1_std,accuracy_mean,accuracy_std,f1_per_seed\n";
  Series van{kVanilla, {}, {}, {}}, aug{kFull, {}, {}, {}};
  for (const auto& p : points) {
    for (const auto* r : {&p.vanilla, &p.augmented}) {
      std::string seeds;
      for (std::size_t k = 0; k < r->f1.size(); ++k) seeds += (k ? ";" : "") + log::strf("%.6f", r->f1[k]);
      csv += log::strf("%s,%g,%s,%.6f,%.6f,%.6f,%.6f,%s\n", name.c_str(), p.value, r->tag.c_str(), r->f1_mean,
                       r->f1_std, r->accuracy_mean, r->accuracy_std, seeds.c_str());
    }
    van.x.push_back(p.value);
    van.y.push_back(p.vanilla.f1_mean);
    van.err.push_back(p.vanilla.f1_std);
    aug.x.push_back(p.value);
    aug.y.push_back(p.augmented.f1_mean);
    aug.err.push_back(p.augmented.f1_std);
  }
  write_text(dir / "sweep.csv", csv);
  write_text(dir / "sweep.svg", line_chart_svg("Test F1 versus " + name, name, "F1", {van, aug}));
}

}  // namespace tdnetgen::eval
