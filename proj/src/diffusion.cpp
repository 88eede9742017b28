#include "tdnetgen/diffusion.hpp"

#include <cmath>
#include <numbers>

#include "tdnetgen/error.hpp"
#include "tdnetgen/random.hpp"

namespace tdnetgen::diffusion {

Mat2 matmul(const Mat2& a, const Mat2& b) {
  Mat2 c{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return c;
}

Mat2 identity2() { return Mat2{{{1.0, 0.0}, {0.0, 1.0}}}; }

// =============================================================================
// Schedule
// =============================================================================

NoiseSchedule NoiseSchedule::from_retention(std::vector<double> retention, double density) {
  if (retention.empty()) throw ConfigError("schedule: need at least one step");
  if (!(density > 0.0 && density < 1.0))
    throw ConfigError("schedule: target density must lie strictly inside (0, 1)");
  NoiseSchedule s;
  s.density_ = density;
  s.retention_ = std::move(retention);
  s.q_bar_.push_back(identity2());
  const std::array<double, 2> marginal{1.0 - density, density};
  for (double a : s.retention_) {
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("schedule: retention coefficients must lie in [0, 1]");
    Mat2 q{};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) q[i][j] = (i == j ? a : 0.0) + (1.0 - a) * marginal[j];
    s.q_.push_back(q);
    s.q_bar_.push_back(matmul(s.q_bar_.back(), q));
  }
  return s;
}

NoiseSchedule NoiseSchedule::cosine(int steps, double density) {
  if (steps < 1) throw ConfigError("schedule: S must be >= 1");
  constexpr double offset = 0.008;
  auto f = [&](int s) {
    const double c = std::cos((static_cast<double>(s) / steps + offset) / (1.0 + offset) * std::numbers::pi / 2.0);
    return c * c;
  };
  std::vector<double> alpha_bar(steps + 1);
  for (int s = 0; s <= steps; ++s) alpha_bar[s] = f(s) / f(0);
  alpha_bar[steps] = 0.0;
  std::vector<double> retention(steps);
  for (int s = 1; s <= steps; ++s)
    retention[s - 1] = std::clamp(alpha_bar[s] / alpha_bar[s - 1], 0.0, 1.0);
  return from_retention(std::move(retention), density);
}

double NoiseSchedule::retention(int s) const {
  if (s < 1 || s > steps()) throw DomainError("schedule: step out of range");
  return retention_[s - 1];
}

const Mat2& NoiseSchedule::q(int s) const {
  if (s < 1 || s > steps()) throw DomainError("schedule: step out of range");
  return q_[s - 1];
}

const Mat2& NoiseSchedule::q_bar(int s) const {
  if (s < 0 || s > steps()) throw DomainError("schedule: step out of range");
  return q_bar_[s];
}

// =============================================================================
// Expanded adjacency and forward process
// =============================================================================

torch::Tensor to_expanded(const Graph& g, torch::Dtype dtype) {
  const int n = g.n_nodes();
  auto e = torch::zeros({n, n, 2}, torch::kFloat64);
  auto acc = e.accessor<double, 3>();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) acc[i][j][g.has_edge(i, j) ? 1 : 0] = 1.0;
  return e.to(dtype);
}

Graph from_expanded(const torch::Tensor& e) {
  if (e.dim() != 3 || e.size(0) != e.size(1) || e.size(2) != 2)
    throw DomainError("from_expanded: expected an [N, N, 2] tensor");
  const auto t = e.detach().to(torch::kFloat64).contiguous();
  auto acc = t.accessor<double, 3>();
  const int n = static_cast<int>(e.size(0));
  Graph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double a = acc[i][j][0], b = acc[i][j][1];
      if (!((a == 1.0 && b == 0.0) || (a == 0.0 && b == 1.0)))
        throw DomainError("from_expanded: entry is not one-hot");
      if (b != acc[j][i][1]) throw DomainError("from_expanded: not symmetric");
      if (i == j && b == 1.0) throw DomainError("from_expanded: self-loop");
      if (i < j && b == 1.0) g.add_edge(i, j);
    }
  return g;
}

Graph forward_sample(const Graph& g0, int s, const NoiseSchedule& schedule, std::uint64_t seed) {
  const Mat2& qb = schedule.q_bar(s);
  Rng rng(seed);
  Graph g(g0.n_nodes());
  for (int i = 0; i < g0.n_nodes(); ++i)
    for (int j = i + 1; j < g0.n_nodes(); ++j) {
      const int e = g0.has_edge(i, j) ? 1 : 0;
      if (uniform01(rng) < qb[e][1]) g.add_edge(i, j);
    }
  return g;
}

namespace {

torch::Tensor sample_symmetric(const torch::Tensor& prob, const torch::Tensor& mask, at::Generator& gen) {
  auto u = torch::rand(prob.sizes(), gen, prob.options());
  auto upper = (u < prob).to(prob.dtype()).triu(1);
  return (upper + upper.transpose(1, 2)) * pair_mask(mask.to(prob.dtype()));
}

}  // namespace

torch::Tensor forward_sample_batch(const torch::Tensor& adj, const torch::Tensor& mask,
                                   const std::vector<int>& steps, const NoiseSchedule& schedule,
                                   at::Generator& gen) {
  const auto b = adj.size(0);
  if (static_cast<std::int64_t>(steps.size()) != b) throw DomainError("forward_sample_batch: one step per graph");
  auto from0 = torch::empty({b, 1, 1}, torch::kFloat64);
  auto from1 = torch::empty({b, 1, 1}, torch::kFloat64);
  for (std::int64_t k = 0; k < b; ++k) {
    const Mat2& qb = schedule.q_bar(steps[k]);
    from0[k][0][0] = qb[0][1];
    from1[k][0][0] = qb[1][1];
  }
  auto a = adj.to(torch::kFloat64);
  auto prob = a * from1 + (1.0 - a) * from0;
  return sample_symmetric(prob, mask, gen).to(adj.dtype());
}

// =============================================================================
// Posterior
// =============================================================================

namespace {

/// c[e_s][e][e_prev] = q(e^{s-1} = e_prev | e^0 = e, e^s), or 0 on impossible paths.
std::array<std::array<std::array<double, 2>, 2>, 2> posterior_coefficients(int s, const NoiseSchedule& sch) {
  if (s < 1 || s > sch.steps()) throw DomainError("posterior: step out of range");
  const Mat2& qs = sch.q(s);
  const Mat2& qb_prev = sch.q_bar(s - 1);
  const Mat2& qb = sch.q_bar(s);
  std::array<std::array<std::array<double, 2>, 2>, 2> c{};
  for (int es = 0; es < 2; ++es)
    for (int e = 0; e < 2; ++e) {
      const double den = qb[e][es];
      for (int ep = 0; ep < 2; ++ep) c[es][e][ep] = den > 0.0 ? qs[ep][es] * qb_prev[e][ep] / den : 0.0;
    }
  return c;
}

}  // namespace

std::array<double, 2> posterior_single(double p_edge, int e_s, int s, const NoiseSchedule& schedule) {
  const auto c = posterior_coefficients(s, schedule);
  const double p0 = 1.0 - p_edge, p1 = p_edge;
  std::array<double, 2> out{p0 * c[e_s][0][0] + p1 * c[e_s][1][0], p0 * c[e_s][0][1] + p1 * c[e_s][1][1]};
  const double z = out[0] + out[1];
  if (z <= 0.0) return e_s == 1 ? std::array<double, 2>{0.0, 1.0} : std::array<double, 2>{1.0, 0.0};
  return {out[0] / z, out[1] / z};
}

torch::Tensor posterior_edge_prob(const torch::Tensor& p_hat, const torch::Tensor& adj_s, int s,
                                  const NoiseSchedule& schedule) {
  const auto c = posterior_coefficients(s, schedule);
  auto p1 = p_hat.to(torch::kFloat64);
  auto p0 = 1.0 - p1;
  auto es = adj_s.to(torch::kFloat64) > 0.5;
  auto post0 = torch::where(es, p0 * c[1][0][0] + p1 * c[1][1][0], p0 * c[0][0][0] + p1 * c[0][1][0]);
  auto post1 = torch::where(es, p0 * c[1][0][1] + p1 * c[1][1][1], p0 * c[0][0][1] + p1 * c[0][1][1]);
  auto z = post0 + post1;
  auto fallback = es.to(torch::kFloat64);
  return torch::where(z > 0.0, post1 / torch::where(z > 0.0, z, torch::ones_like(z)), fallback);
}

// =============================================================================
// Features
// =============================================================================

GraphFeatures compute_node_features(const torch::Tensor& adj, const torch::Tensor& mask) {
  torch::NoGradGuard guard;
  auto a = adj.to(torch::kFloat64) * pair_mask(mask.to(torch::kFloat64));
  auto m = mask.to(torch::kFloat64);
  const auto b = a.size(0), n = a.size(1);
  auto d = a.sum(-1);
  auto a2 = torch::bmm(a, a);
  auto a3 = torch::bmm(a2, a);
  auto a4 = torch::bmm(a3, a);
  auto a5 = torch::bmm(a4, a);
  auto diag = [](const torch::Tensor& x) { return x.diagonal(0, -2, -1); };
  auto t3 = diag(a3);
  auto c3 = t3 / 2.0;
  auto c4 = (diag(a4) - d * d - torch::bmm(a, (d - 1.0).unsqueeze(-1)).squeeze(-1)) / 2.0;
  // Closed 5-walks minus those made of a triangle plus one back-and-forth step.
  auto tri_deg = (a * a2 * d.unsqueeze(1)).sum(-1);
  auto c5 = (diag(a5) - 2.0 * t3 * d + 5.0 * t3 - torch::bmm(a, t3.unsqueeze(-1)).squeeze(-1) -
             2.0 * tri_deg) /
            2.0;

  GraphFeatures f;
  f.cycles = torch::stack({c3, c4, c5}, -1) * m.unsqueeze(-1);

  // Padded nodes get a large isolated diagonal so their eigenvalues sort last.
  const double big = 4.0 * static_cast<double>(n) + 10.0;
  auto lap = torch::diag_embed(d + (1.0 - m) * big) - a;
  auto [evals, evecs] = torch::linalg_eigh(lap);
  f.n_components = torch::zeros({b}, torch::kFloat64);
  f.eigvecs = torch::zeros({b, n, 2}, torch::kFloat64);
  auto ev = evals.accessor<double, 2>();
  auto nvalid = m.sum(-1);
  for (std::int64_t k = 0; k < b; ++k) {
    const int nv = static_cast<int>(std::lround(nvalid[k].item<double>()));
    int zeros = 0;
    for (int i = 0; i < nv; ++i)
      if (ev[k][i] < 1e-5) ++zeros;
    f.n_components[k] = zeros;
    for (int c = 0; c < 2; ++c) {
      const int idx = zeros + c;
      if (idx >= nv) break;
      const double lambda = ev[k][idx];
      std::vector<std::int64_t> space;
      for (int j = zeros; j < nv; ++j)
        if (std::abs(ev[k][j] - lambda) <= 1e-6 * std::max(1.0, lambda)) space.push_back(j);
      auto v = evecs[k].select(1, idx).clone();
      // A simple eigenvalue keeps its vector with the sign fixed by the third
      // moment. Degenerate or sign-symmetric cases have no canonical vector;
      // they use sqrt(diag(P) / dim) of the eigenspace projector P instead.
      const double skew = v.pow(3).sum().item<double>();
      if (space.size() == 1 && std::abs(skew) > 1e-8) {
        v = skew > 0.0 ? v : -v;
      } else {
        auto basis = evecs[k].index_select(1, torch::tensor(space));
        v = (basis.pow(2).sum(1) / static_cast<double>(space.size())).sqrt();
      }
      f.eigvecs[k].select(1, c).copy_(v * m[k]);
    }
  }
  return f;
}

torch::Tensor time_embedding(const torch::Tensor& t, int dim) {
  const int half = dim / 2;
  auto freqs = torch::exp(-std::log(10000.0) * torch::arange(half, t.options()) / std::max(1, half));
  auto args = (t * 1000.0).unsqueeze(-1) * freqs.unsqueeze(0);
  auto emb = torch::cat({torch::sin(args), torch::cos(args)}, -1);
  if (dim % 2 == 1) emb = torch::cat({emb, torch::zeros({t.size(0), 1}, t.options())}, -1);
  return emb;
}

// =============================================================================
// Reverse chain
// =============================================================================

torch::Tensor reverse_chain(const EdgePredictor& predictor, const NoiseSchedule& schedule,
                            const torch::Tensor& mask, std::uint64_t seed, const PosteriorHook& hook) {
  torch::NoGradGuard guard;
  auto gen = make_generator(seed);
  auto m = mask.to(torch::kFloat64);
  const auto b = m.size(0), n = m.size(1);
  auto x = sample_symmetric(torch::full({b, n, n}, schedule.density(), torch::kFloat64), m, gen);
  for (int s = schedule.steps(); s >= 1; --s) {
    auto p_hat = predictor(x, m, s).to(torch::kFloat64);
    auto prob = posterior_edge_prob(p_hat, x, s, schedule);
    if (hook) {
      auto logits = hook(x, m, s, torch::logit(prob));
      prob = torch::sigmoid(logits);
    }
    if (!torch::isfinite(prob).all().item<bool>()) throw NumericError("reverse_chain: non-finite posterior");
    x = sample_symmetric(prob, m, gen);
  }
  return x;
}

std::vector<Graph> sample_unconditional(const EdgePredictor& predictor, const NoiseSchedule& schedule,
                                        const std::vector<int>& n_nodes, std::uint64_t seed) {
  if (n_nodes.empty()) return {};
  const int n_max = *std::max_element(n_nodes.begin(), n_nodes.end());
  auto mask = torch::zeros({static_cast<std::int64_t>(n_nodes.size()), n_max}, torch::kFloat64);
  for (std::size_t k = 0; k < n_nodes.size(); ++k) mask[k].narrow(0, 0, n_nodes[k]).fill_(1.0);
  auto x = reverse_chain(predictor, schedule, mask, seed);
  std::vector<Graph> out;
  for (std::size_t k = 0; k < n_nodes.size(); ++k) out.push_back(graph_from_adjacency(x[k], n_nodes[k]));
  return out;
}

Graph sample_unconditional(const EdgePredictor& predictor, const NoiseSchedule& schedule, int n_nodes,
                           std::uint64_t seed) {
  return sample_unconditional(predictor, schedule, std::vector<int>{n_nodes}, seed).front();
}

}  // namespace tdnetgen::diffusion
