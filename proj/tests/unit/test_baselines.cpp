#include <doctest.h>

#include "tdnetgen/baselines.hpp"
#include "tdnetgen/error.hpp"
#include "tdnetgen/metrics.hpp"
#include "tdnetgen/module_util.hpp"

using namespace tdnetgen;
using namespace tdnetgen::baselines;

namespace {

std::vector<NetworkSample> ids(std::initializer_list<std::int64_t> list) {
  std::vector<NetworkSample> out;
  for (auto id : list) {
    NetworkSample s;
    s.id = id;
    out.push_back(s);
  }
  return out;
}

predictor::PredictorConfig small() {
  predictor::PredictorConfig c;
  c.d_embed = 16;
  c.heads = 2;
  c.encoder_layers = 1;
  return c;
}

std::vector<int> labels_of(const std::vector<NetworkSample>& s) {
  std::vector<int> y;
  for (const auto& x : s) y.push_back(dynsim::as_int(*x.label));
  return y;
}

}  // namespace

TEST_CASE("confidence selection orders by margin then id") {
  const auto pool = ids({7, 3, 9, 1, 5});
  const std::vector<double> p{0.9, 0.1, 0.55, 0.5, 0.95};
  SelfTrainConfig cfg;
  cfg.n_pseudo = 3;
  // Margins: 0.4, 0.4, 0.05, 0.0, 0.45; ids 3 and 7 tie at 0.4.
  CHECK(select_confident(p, pool, cfg) == std::vector<std::size_t>{4, 1, 0});
  cfg.n_pseudo = 10;
  CHECK(select_confident(p, pool, cfg).size() == 5u);
  cfg.policy = ConfidencePolicy::THRESHOLD;
  cfg.threshold = 0.4;
  CHECK(select_confident(p, pool, cfg) == std::vector<std::size_t>{4, 1, 0});
  CHECK_THROWS_AS(select_confident({0.5}, pool, cfg), DomainError);
}

TEST_CASE("self-training on separable data keeps F1 and audits pseudo labels") {
  netgen::TopologySpec ts;
  ts.n_nodes = {20, 40};
  const auto data = dataset::build_dataset(ts, {}, {}, {}, {60, 30, 30, 40}, 6, 11);
  predictor::PredictorTrainConfig tc;
  tc.epochs = 40;
  tc.patience = 20;
  tc.seed = 1;
  auto vanilla = predictor::train_predictor(small(), data.labeled, data.validation, tc);
  const auto y = labels_of(data.test);
  const double before = eval::compute_metrics(predictor::predict_labels(vanilla.model, data.test), y).f1;

  SelfTrainConfig cfg;
  cfg.n_pseudo = 20;
  auto tc2 = tc;
  tc2.epochs = 20;
  auto st = self_train(vanilla.model, data.labeled, data.unlabeled, data.validation, cfg, tc2,
                       data.provenance.audit_labels);
  CHECK(st.pseudo.size() == 20u);
  for (const auto& s : st.pseudo) {
    CHECK(s.label_source == dataset::LabelSource::PSEUDO);
    CHECK(s.label.has_value());
  }
  REQUIRE(st.pseudo_error_rate.has_value());
  CHECK(*st.pseudo_error_rate >= 0.0);
  CHECK(*st.pseudo_error_rate <= 1.0);
  const double after = eval::compute_metrics(predictor::predict_labels(st.model, data.test), y).f1;
  MESSAGE("vanilla F1 " << before << " self-trained F1 " << after << " pseudo error " << *st.pseudo_error_rate);
  CHECK(after >= before - 0.05);

  cfg.n_pseudo = static_cast<int>(data.unlabeled.size()) + 1;
  CHECK_THROWS_AS(self_train(vanilla.model, data.labeled, data.unlabeled, data.validation, cfg, tc2), ConfigError);

  cfg.n_pseudo = 5;
  cfg.policy = ConfidencePolicy::THRESHOLD;
  cfg.threshold = 0.6;  // unreachable margin: the round is skipped
  auto none = self_train(vanilla.model, data.labeled, data.unlabeled, data.validation, cfg, tc2);
  CHECK(none.pseudo.empty());
}
