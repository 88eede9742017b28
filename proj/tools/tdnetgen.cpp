// tdnetgen command-line driver. Every subcommand reads an optional run config,
// writes into its own directory under --out and copies the config it used.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tdnetgen/augment.hpp"
#include "tdnetgen/benchmark.hpp"
#include "tdnetgen/checkpoint.hpp"
#include "tdnetgen/error.hpp"
#include "tdnetgen/log.hpp"
#include "tdnetgen/plot.hpp"
#include "tdnetgen/run_config.hpp"
#include "tdnetgen/stats.hpp"
#include "tdnetgen/theory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tdnetgen;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "run";
};

struct Context {
  RunConfig cfg;
  std::uint64_t seed = 0;
  fs::path out;
  fs::path cache;

  fs::path dir(const char* name) const { return out / name; }

  augment::PipelineConfig pipeline() const {
    auto p = cfg.experiment.pipeline;
    p.seed = seed;
    return p;
  }

  dataset::DatasetSplit data() const {
    const auto d = dir("data");
    if (!fs::exists(d / "manifest.json")) throw IoError("no dataset at " + d.string() + " (run gen-data first)");
    return dataset::load_dataset(d);
  }

  // Stage output directory with a copy of the effective config, loadable with --config.
  fs::path stage(const char* name) const {
    const auto d = dir(name);
    fs::create_directories(d);
    eval::write_text(d / "config.json", to_json(cfg).dump(2) + "\n");
    return d;
  }
};

Context make_context(const Options& o) {
  Context c;
  if (!o.config.empty()) c.cfg = load_run_config(o.config);
  c.cfg.validate();
  if (o.seed) c.cfg.experiment.seeds = {*o.seed};
  c.seed = c.cfg.experiment.seeds.front();
  c.out = o.out;
  const char* env = std::getenv("TDNETGEN_CACHE");
  c.cache = env && *env ? fs::path(env) : c.out / "cache";
  c.cfg.experiment.cache = c.cache;
  log::set_level(c.cfg.log_level);
  return c;
}

json metrics_json(const eval::Metrics& m) {
  return {{"f1", m.f1}, {"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall}};
}

std::vector<int> labels_of(const std::vector<dataset::NetworkSample>& samples) {
  std::vector<int> y;
  for (const auto& s : samples) y.push_back(dynsim::as_int(s.label.value()));
  return y;
}

std::string series_csv(const char* header, const std::vector<std::vector<double>>& columns) {
  std::string out = std::string(header) + "\n";
  std::size_t n = 0;
  for (const auto& c : columns) n = std::max(n, c.size());
  for (std::size_t k = 0; k < n; ++k) {
    out += std::to_string(k + 1);
    for (const auto& c : columns) out += k < c.size() ? log::strf(",%.8g", c[k]) : std::string(",");
    out += "\n";
  }
  return out;
}

// Test predictions (id,probability,predicted,label) and metrics.
json write_predictions(predictor::Predictor& model, const dataset::DatasetSplit& data, const fs::path& dir) {
  const auto p = predictor::predict_proba(model, data.test);
  const auto y = labels_of(data.test);
  std::vector<int> pred;
  std::string csv = "id,probability,predicted,label\n";
  for (std::size_t k = 0; k < p.size(); ++k) {
    pred.push_back(p[k] >= 0.5 ? 1 : 0);
    csv += log::strf("%lld,%.6f,%d,%d\n", static_cast<long long>(data.test[k].id), p[k], pred.back(), y[k]);
  }
  eval::write_text(dir / "predictions.csv", csv);
  return metrics_json(eval::compute_metrics(pred, y));
}

predictor::Predictor load_guide(const Context& c, bool finetuned) {
  const auto ft = c.dir("finetune") / "model.ckpt";
  if (finetuned) {
    if (!fs::exists(ft)) throw IoError("no fine-tuned predictor at " + ft.string() + " (run finetune first)");
    return checkpoint::load_predictor(ft);
  }
  return checkpoint::load_predictor(c.dir("predictor") / "model.ckpt");
}

void write_json(const fs::path& path, const json& j) { eval::write_text(path, j.dump(2) + "\n"); }

void cmd_gen_data(const Context& c) {
  const auto& e = c.cfg.experiment;
  auto data = dataset::build_dataset(e.topology, e.dynamics, e.sim, e.rule, e.counts, e.t_obs, c.seed);
  const auto d = c.stage("data");
  dataset::save_dataset(data, d);
  const auto lb = dataset::class_balance(data.labeled), tb = dataset::class_balance(data.test);
  log::info(log::strf("dataset: %zu labeled (%d resilient), %zu unlabeled, %zu validation, %zu test (%d resilient)",
                      data.labeled.size(), lb.resilient, data.unlabeled.size(), data.validation.size(),
                      data.test.size(), tb.resilient));
}

void cmd_train_dyn(const Context& c) {
  const auto data = c.data();
  auto trained = augment::stage_train_dynamics(data, c.pipeline());
  const auto d = c.stage("dynamics");
  checkpoint::save_dynamics(d / "model.ckpt", trained.model);
  eval::write_text(d / "loss.csv", series_csv("epoch,loss", {trained.loss}));
  write_json(d / "metrics.json",
             {{"final_loss", trained.loss.empty() ? 0.0 : trained.loss.back()},
              {"n_trained_samples", trained.n_trained_samples},
              {"validation_l1", dynlearn::mean_l1_gap(trained.model, data.validation, data.provenance.sim.dt)},
              {"persistence_l1", dynlearn::persistence_l1_gap(data.validation)}});
}

void cmd_train_diff(const Context& c) {
  const auto data = c.data();
  auto trained = augment::stage_train_denoiser(data, c.pipeline());
  const auto d = c.stage("denoiser");
  checkpoint::save_denoiser(d / "model.ckpt", trained.model, trained.schedule);
  eval::write_text(d / "loss.csv", series_csv("epoch,train_loss,val_loss", {trained.train_loss, trained.val_loss}));
  write_json(d / "metrics.json",
             {{"best_val_loss", trained.best_val_loss}, {"target_density", trained.schedule.density()}});
}

void cmd_train_pred(const Context& c) {
  const auto data = c.data();
  auto trained = augment::stage_train_vanilla(data, c.pipeline());
  const auto d = c.stage("predictor");
  checkpoint::save_predictor(d / "model.ckpt", trained.model);
  eval::write_text(d / "loss.csv", series_csv("epoch,train_loss,val_loss,val_f1",
                                               {trained.train_loss, trained.val_loss, trained.val_f1}));
  write_json(d / "metrics.json", {{"best_epoch", trained.best_epoch},
                                  {"best_val_f1", trained.best_val_f1},
                                  {"test", write_predictions(trained.model, data, d)}});
}

void cmd_finetune(const Context& c) {
  const auto data = c.data();
  auto vanilla = checkpoint::load_predictor(c.dir("predictor") / "model.ckpt");
  auto dynamics = checkpoint::load_dynamics(c.dir("dynamics") / "model.ckpt");
  auto tuned = augment::stage_finetune(vanilla, data, dynamics, c.pipeline());
  const auto d = c.stage("finetune");
  checkpoint::save_predictor(d / "model.ckpt", tuned.model);
  write_json(d / "metrics.json", {{"best_epoch", tuned.best_epoch},
                                  {"best_val_f1_learned", tuned.best_val_f1},
                                  {"test", write_predictions(tuned.model, data, d)}});
}

void cmd_generate(const Context& c) {
  const auto data = c.data();
  const auto p = c.pipeline();
  auto den = checkpoint::load_denoiser(c.dir("denoiser") / "model.ckpt");
  auto dynamics = checkpoint::load_dynamics(c.dir("dynamics") / "model.ckpt");
  auto guide = load_guide(c, !p.no_finetune);
  auto generated = augment::stage_generate(den.model, den.schedule, guide, dynamics, data, p);
  const auto d = c.stage("generate");
  dataset::save_samples(generated, d / "samples", "generated");
  std::string csv = "id,n_nodes,n_edges,density,label,label_source\n";
  for (const auto& s : generated) {
    const double n = s.graph.n_nodes();
    csv += log::strf("%lld,%d,%d,%.6f,%d,%s\n", static_cast<long long>(s.id), s.graph.n_nodes(), s.graph.n_edges(),
                     n > 1 ? s.graph.n_edges() / (0.5 * n * (n - 1.0)) : 0.0, dynsim::as_int(s.label.value()),
                     std::string(dataset::to_string(s.label_source)).c_str());
  }
  eval::write_text(d / "samples.csv", csv);
  write_json(d / "summary.json", augment::generation_summary(generated, p.no_guidance ? nullptr : &guide));
}

void cmd_augment(const Context& c) {
  const auto data = c.data();
  auto r = augment::run_pipeline(data, c.pipeline(), c.cache);
  const auto d = c.stage("augment");
  write_json(d / "report.json", r.report);
  checkpoint::save_predictor(d / "model.ckpt", r.final_model);
  dataset::save_samples(r.used, d / "used", "generated");
  write_predictions(r.final_model, data, d);
  std::cout << log::strf("vanilla  test F1 %.4f  accuracy %.4f\n", r.vanilla_test.f1, r.vanilla_test.accuracy)
            << log::strf("TDNetGen test F1 %.4f  accuracy %.4f  (%zu generated graphs used)\n", r.final_test.f1,
                         r.final_test.accuracy, r.used.size());
}

void cmd_evaluate(const Context& c) {
  auto e = c.cfg.experiment;
  auto result = eval::run_benchmark(e);
  const auto d = c.stage("evaluate");
  eval::write_benchmark(result, d);
  std::cout << eval::summary_table(result.rows);
}

void cmd_sweep(const Context& c) {
  const auto axis = eval::parse_sweep_axis(c.cfg.sweep.axis);
  auto points = eval::sweep(axis, c.cfg.sweep.values, c.cfg.experiment);
  const auto d = c.stage("sweep");
  eval::write_sweep(axis, points, d / eval::to_string(axis));
}

void cmd_theory(const Context& c) {
  const auto data = c.data();
  const auto& spec = data.provenance.dynamics;
  const double beta_crit = theory::bifurcation_point(spec);
  const auto th = theory::theory_thresholds(data.labeled);
  const auto& audit = data.provenance.audit_labels;

  std::string csv = "id,pool,beta_eff,theory_label,label\n";
  std::vector<double> values;
  std::vector<int> labels, predicted;
  auto add = [&](const std::vector<dataset::NetworkSample>& pool, const char* name) {
    for (const auto& s : pool) {
      const double b = theory::beta_eff_or_zero(s.graph);
      const int t = dynsim::as_int(theory::theory_predict(s.graph, beta_crit));
      std::optional<int> y;
      if (s.label) y = dynsim::as_int(*s.label);
      else if (auto it = audit.find(s.id); it != audit.end()) y = dynsim::as_int(it->second);
      csv += log::strf("%lld,%s,%.8g,%d,%s\n", static_cast<long long>(s.id), name, b, t,
                       y ? std::to_string(*y).c_str() : "");
      if (y) {
        values.push_back(b);
        labels.push_back(*y);
        predicted.push_back(t);
      }
    }
  };
  add(data.labeled, "labeled");
  add(data.unlabeled, "unlabeled");
  add(data.validation, "validation");
  add(data.test, "test");

  const auto d = c.stage("theory");
  eval::write_text(d / "beta_eff.csv", csv);
  const auto agreement = eval::compute_metrics(predicted, labels);
  const auto newly = theory::theory_label_unlabeled(data.labeled, data.unlabeled);
  json summary = {{"dynamics", std::string(dynsim::to_string(spec.family))},
                  {"beta_crit", beta_crit},
                  {"beta_plus", th.beta_plus},
                  {"beta_minus", th.beta_minus},
                  {"thresholds_consistent", th.consistent},
                  {"point_biserial", stats::point_biserial(values, labels)},
                  {"theory_vs_simulated", metrics_json(agreement)},
                  {"n_theory_labeled_unlabeled", newly.size()}};
  write_json(d / "summary.json", summary);
  std::cout << summary.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resilience prediction with trajectory-guided network generation"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("-c,--config", opt.config, "run config JSON (defaults when omitted)")->check(CLI::ExistingFile);
  app.add_option("-s,--seed", opt.seed, "seed for every stage; evaluate and sweep then run this seed only (default: configured seeds)");
  app.add_option("-o,--out", opt.out, "run directory")->capture_default_str();

  struct Command {
    const char* name;
    const char* help;
    void (*run)(const Context&);
  };
  const Command commands[] = {
      {"gen-data", "simulate and split the dataset into <out>/data", cmd_gen_data},
      {"train-dyn", "train the dynamics learner", cmd_train_dyn},
      {"train-diff", "train the topology denoiser", cmd_train_diff},
      {"train-pred", "train the vanilla resilience predictor", cmd_train_pred},
      {"finetune", "fine-tune the predictor on learned trajectories", cmd_finetune},
      {"generate", "sample labeled topologies with guidance", cmd_generate},
      {"augment", "run the seven-stage pipeline with the stage cache", cmd_augment},
      {"evaluate", "all methods over the configured seeds", cmd_evaluate},
      {"sweep", "vanilla versus augmented along the configured axis", cmd_sweep},
      {"theory", "effective-parameter analysis of the dataset", cmd_theory},
  };
  for (const auto& cmd : commands) {
    app.add_subcommand(cmd.name, cmd.help)->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const auto ctx = make_context(opt);
    for (const auto& cmd : commands)
      if (app.got_subcommand(cmd.name)) cmd.run(ctx);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
