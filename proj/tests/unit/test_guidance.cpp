#include <doctest.h>

#include <cmath>

#include "../common/fd.hpp"
#include "tdnetgen/error.hpp"
#include "tdnetgen/guidance.hpp"
#include "tdnetgen/module_util.hpp"

using namespace tdnetgen;
using namespace tdnetgen::guidance;

namespace {

predictor::PredictorConfig small() {
  predictor::PredictorConfig c;
  c.d_embed = 8;
  c.heads = 2;
  c.encoder_layers = 1;
  c.gcn_layers = 2;
  c.max_time = 8;
  c.attn_hidden = 4;
  return c;
}

torch::Tensor random_rows(std::int64_t n) {
  auto p = torch::rand({n}, torch::kFloat64) * 0.98 + 0.01;
  return torch::stack({1.0 - p, p}, -1);
}

}  // namespace

TEST_CASE("guided posterior arithmetic") {
  auto base = random_rows(50);
  auto grad = torch::randn({50, 2}, torch::kFloat64) * 1e-3;

  CHECK(torch::equal(guided_posterior(base, grad, 0.0), base));

  const double lambda = 700.0;
  auto out = guided_posterior(base, grad, lambda);
  CHECK(((out.sum(-1) - 1.0).abs().max().item<double>()) < 1e-9);
  CHECK((out >= 0).all().item<bool>());
  for (int k = 0; k < 5; ++k) {
    const double p0 = base[k][0].item<double>(), p1 = base[k][1].item<double>();
    const double g0 = grad[k][0].item<double>(), g1 = grad[k][1].item<double>();
    const double w0 = p0 * std::exp(-lambda * g0), w1 = p1 * std::exp(-lambda * g1);
    CHECK(out[k][1].item<double>() == doctest::Approx(w1 / (w0 + w1)).epsilon(1e-12));
  }

  // A constant shift of both components leaves the row unchanged.
  auto equal = torch::full({50, 2}, 0.37, torch::kFloat64);
  CHECK(torch::allclose(guided_posterior(base, equal, 1e4), base, 0.0, 1e-12));

  // Continuity at zero intensity.
  CHECK((guided_posterior(base, grad, 1e-3) - base).abs().max().item<double>() < 1e-5);

  // Larger intensity moves mass toward the state with the smaller gradient.
  auto low = guided_posterior(base, grad, 100.0), high = guided_posterior(base, grad, 1000.0);
  auto favoured = (grad.select(-1, 1) < grad.select(-1, 0));
  auto gained = high.select(-1, 1) > low.select(-1, 1);
  CHECK(torch::equal(favoured, gained));

  // Extreme tilts underflow in probability space but not in log space.
  auto huge = guided_posterior(base, torch::tensor({{0.0, 5.0}}, torch::kFloat64).expand({50, 2}), 1e6);
  CHECK(torch::isfinite(huge).all().item<bool>());
  CHECK(((huge.sum(-1) - 1.0).abs().max().item<double>()) < 1e-9);
}

TEST_CASE("pair gradient is symmetric") {
  auto g = torch::randn({2, 5, 5, 2});
  auto p = pair_gradient(g);
  CHECK(torch::allclose(p, p.transpose(1, 2)));
  CHECK(p[0][1][3][1].item<float>() == doctest::Approx(g[0][1][3][1].item<float>() + g[0][3][1][1].item<float>()));
}

TEST_CASE("guidance gradient matches finite differences and flips with the target") {
  seed_torch(3);
  predictor::Predictor model(small());
  model->to(torch::kFloat64);
  auto a = torch::rand({1, 5, 5}, torch::kFloat64).triu(1);
  a = a + a.transpose(1, 2);
  auto mask = torch::ones({1, 5}, torch::kFloat64);
  auto obs = torch::rand({1, 2, 5, 6}, torch::kFloat64) * 4.0;
  auto one = torch::ones({1}, torch::kFloat64);

  auto g = guidance_gradient_with(model, a, mask, obs, one);
  CHECK(g.sizes() == std::vector<std::int64_t>{1, 5, 5, 2});
  CHECK(g.select(-1, 0).abs().max().item<double>() == 0.0);

  auto soft = a.clone().requires_grad_(true);
  auto r = testing::check_gradients({soft}, [&] {
    return torch::binary_cross_entropy_with_logits(model->forward(soft, mask, obs), one, {}, {}, at::Reduction::Sum);
  });
  CHECK(r.rel_error < 1e-3);
  CHECK(torch::allclose(soft.grad(), g.select(-1, 1), 1e-10, 1e-12));

  auto g0 = guidance_gradient_with(model, a, mask, obs, torch::zeros({1}, torch::kFloat64));
  auto x = g.select(-1, 1).flatten(), y = g0.select(-1, 1).flatten();
  const double cosine = (x * y).sum().item<double>() / (x.norm() * y.norm()).item<double>();
  CHECK(cosine < 0.0);
}

TEST_CASE("predictor over learned trajectories is differentiable in the adjacency") {
  seed_torch(8);
  predictor::Predictor model(small());
  model->to(torch::kFloat64);
  dynlearn::DynamicsNet dyn(dynlearn::DynLearnConfig{4, 1});
  dyn->to(torch::kFloat64);
  dyn->set_window(0.5, 2.5);
  const auto rules = dynsim::default_init_rules(dynsim::DynamicsFamily::MUTUALISTIC);
  auto a = torch::rand({1, 5, 5}, torch::kFloat64).triu(1);
  a = a + a.transpose(1, 2);
  auto mask = torch::ones({1, 5}, torch::kFloat64);
  auto one = torch::ones({1}, torch::kFloat64);

  auto soft = a.clone().requires_grad_(true);
  auto r = testing::check_gradients({soft}, [&] {
    auto obs = dynlearn::generate_batch(dyn, soft, mask, rules, {}, 4, 2);
    return torch::binary_cross_entropy_with_logits(model->forward(soft, mask, obs), one, {}, {}, at::Reduction::Sum);
  });
  CHECK(r.rel_error < 1e-3);

  TrajectorySource src{&dyn, rules, {}, 4};
  auto through = guidance_gradient(model, src, a, mask, one, 2, true);
  CHECK(torch::allclose(through.select(-1, 1), soft.grad(), 1e-10, 1e-12));
  // The constant-trajectory gradient uses the hardened graph and differs.
  auto fixed = guidance_gradient(model, src, a, mask, one, 2, false);
  CHECK(fixed.sizes() == through.sizes());
  CHECK_FALSE(torch::allclose(fixed, through));
}

TEST_CASE("saturated agreement gives a vanishing gradient") {
  seed_torch(4);
  predictor::Predictor model(small());
  model->to(torch::kFloat64);
  {
    torch::NoGradGuard guard;
    for (auto& item : model->named_parameters())
      if (item.key() == "classifier.2.bias") item.value().fill_(60.0);
  }
  auto a = torch::ones({1, 5, 5}, torch::kFloat64) - torch::eye(5, torch::kFloat64).unsqueeze(0);
  auto obs = torch::rand({1, 2, 5, 6}, torch::kFloat64);
  auto g = guidance_gradient_with(model, a, torch::ones({1, 5}, torch::kFloat64), obs, torch::ones({1}, torch::kFloat64));
  CHECK(g.abs().max().item<double>() < 1e-12);
}

TEST_CASE("conditional sampling returns labeled graphs deterministically") {
  seed_torch(5);
  predictor::Predictor model(small());
  dynlearn::DynamicsNet dyn(dynlearn::DynLearnConfig{8, 1});
  dyn->set_window(0.5, 2.5);
  diffusion::DenoiserConfig dc;
  dc.layers = 1;
  dc.heads = 2;
  dc.d_node = 8;
  dc.d_edge = 4;
  dc.d_time = 4;
  diffusion::Denoiser den(dc);
  const auto sch = diffusion::NoiseSchedule::cosine(8, 0.2);
  auto edge = diffusion::make_edge_predictor(den, sch);
  TrajectorySource src{&dyn, dynsim::default_init_rules(dynsim::DynamicsFamily::MUTUALISTIC), {}, 6};
  GuidanceConfig cfg;
  cfg.lambda = 50.0;
  cfg.stride = 3;
  auto a = sample_conditional(edge, sch, model, src, {6, 9, 7}, Resilience::RESILIENT, cfg, 1);
  auto b = sample_conditional(edge, sch, model, src, {6, 9, 7}, Resilience::RESILIENT, cfg, 1);
  REQUIRE(a.size() == 3u);
  CHECK(a[1].graph.n_nodes() == 9);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].graph == b[k].graph);
    CHECK(a[k].intended == Resilience::RESILIENT);
  }
  cfg.lambda = -1.0;
  CHECK_THROWS_AS(sample_conditional(edge, sch, model, src, {6}, Resilience::RESILIENT, cfg, 1), ConfigError);
  cfg.lambda = 1.0;
  cfg.stride = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
