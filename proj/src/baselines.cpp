#include "tdnetgen/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "tdnetgen/error.hpp"
#include "tdnetgen/log.hpp"
#include "tdnetgen/random.hpp"
#include "tdnetgen/theory.hpp"

namespace tdnetgen::baselines {

std::vector<std::size_t> select_confident(const std::vector<double>& proba, const std::vector<NetworkSample>& pool,
                                          const SelfTrainConfig& cfg) {
  if (proba.size() != pool.size()) throw DomainError("select_confident: one probability per sample required");
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ca = std::abs(proba[a] - 0.5), cb = std::abs(proba[b] - 0.5);
    if (ca != cb) return ca > cb;
    return pool[a].id < pool[b].id;
  });
  if (cfg.policy == ConfidencePolicy::THRESHOLD) {
    std::vector<std::size_t> out;
    for (auto k : order)
      if (std::abs(proba[k] - 0.5) >= cfg.threshold) out.push_back(k);
    return out;
  }
  order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(std::max(cfg.n_pseudo, 0))));
  return order;
}

SelfTrainResult self_train(const predictor::Predictor& vanilla, const std::vector<NetworkSample>& labeled,
                           const std::vector<NetworkSample>& unlabeled, const std::vector<NetworkSample>& validation,
                           const SelfTrainConfig& cfg, const predictor::PredictorTrainConfig& train_cfg,
                           const std::map<std::int64_t, Resilience>& audit) {
  if (cfg.n_pseudo < 0 || cfg.n_pseudo > static_cast<int>(unlabeled.size()))
    throw ConfigError("self_train: n_pseudo must lie in [0, |unlabeled|]");
  if (cfg.rounds < 1) throw ConfigError("self_train: rounds must be >= 1");

  SelfTrainResult out;
  out.model = predictor::clone(vanilla);
  std::vector<NetworkSample> pool = unlabeled;
  int wrong = 0, audited = 0;
  for (int round = 0; round < cfg.rounds; ++round) {
    if (pool.empty()) break;
    const auto proba = predictor::predict_proba(out.model, pool);
    auto chosen = select_confident(proba, pool, cfg);
    if (chosen.empty()) {
      log::warn("self_train: no sample passed the confidence threshold in round " + std::to_string(round));
      continue;
    }
    std::set<std::size_t> taken(chosen.begin(), chosen.end());
    for (auto k : chosen) {
      NetworkSample s = pool[k];
      s.label = proba[k] >= 0.5 ? Resilience::RESILIENT : Resilience::NON_RESILIENT;
      s.label_source = dataset::LabelSource::PSEUDO;
      if (auto it = audit.find(s.id); it != audit.end()) {
        ++audited;
        wrong += it->second != *s.label;
      }
      out.pseudo.push_back(std::move(s));
    }
    std::vector<NetworkSample> rest;
    for (std::size_t k = 0; k < pool.size(); ++k)
      if (!taken.count(k)) rest.push_back(std::move(pool[k]));
    pool = std::move(rest);

    std::vector<NetworkSample> train = labeled;
    train.insert(train.end(), out.pseudo.begin(), out.pseudo.end());
    auto cfg_round = train_cfg;
    cfg_round.seed = derive_seed(train_cfg.seed, 0x7374, round);
    out.model = predictor::train_predictor(vanilla->config(), train, validation, cfg_round, &out.model).model;
  }
  if (audited > 0) out.pseudo_error_rate = static_cast<double>(wrong) / audited;
  return out;
}

TheoryAugmentResult theory_augment(const predictor::Predictor& vanilla, const std::vector<NetworkSample>& labeled,
                                   const std::vector<NetworkSample>& unlabeled,
                                   const std::vector<NetworkSample>& validation, int n_added,
                                   const predictor::PredictorTrainConfig& train_cfg) {
  TheoryAugmentResult out;
  auto added = theory::theory_label_unlabeled(labeled, unlabeled);
  if (n_added >= 0 && static_cast<int>(added.size()) > n_added) {
    Rng rng(derive_seed(train_cfg.seed, 0x747279));
    std::shuffle(added.begin(), added.end(), rng);
    added.resize(n_added);
    std::sort(added.begin(), added.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  }
  out.added = added;
  std::vector<NetworkSample> train = labeled;
  train.insert(train.end(), added.begin(), added.end());
  out.model = predictor::train_predictor(vanilla->config(), train, validation, train_cfg, &vanilla).model;
  return out;
}

}  // namespace tdnetgen::baselines
