#include "tdnetgen/spec_json.hpp"

#include <string>

namespace tdnetgen {
namespace {

template <typename T>
void read_opt(const nlohmann::json& j, const char* key, T& field) {
  if (j.contains(key)) j.at(key).get_to(field);
}

}  // namespace

namespace netgen {

void to_json(nlohmann::json& j, const Range& r) { j = nlohmann::json::array({r.lo, r.hi}); }
void from_json(const nlohmann::json& j, Range& r) {
  r.lo = j.at(0).get<double>();
  r.hi = j.at(1).get<double>();
}
void to_json(nlohmann::json& j, const IntRange& r) { j = nlohmann::json::array({r.lo, r.hi}); }
void from_json(const nlohmann::json& j, IntRange& r) {
  r.lo = j.at(0).get<int>();
  r.hi = j.at(1).get<int>();
}

void to_json(nlohmann::json& j, const TopologySpec& s) {
  j = {{"family", std::string(to_string(s.family))},
       {"n_nodes", s.n_nodes},
       {"er_p", s.er_p},
       {"ba_m", s.ba_m},
       {"s1_beta", s.s1_beta},
       {"s1_gamma", s.s1_gamma},
       {"s1_mean_degree", s.s1_mean_degree},
       {"sbm_communities", s.sbm_communities},
       {"sbm_p_intra", s.sbm_p_intra},
       {"sbm_p_inter", s.sbm_p_inter},
       {"modular_base_nodes", s.modular_base_nodes},
       {"modular_p_in", s.modular_p_in},
       {"modular_p_out", s.modular_p_out},
       {"modular_base_seed", s.modular_base_seed},
       {"modular_removal", s.modular_removal}};
}

void from_json(const nlohmann::json& j, TopologySpec& s) {
  if (j.contains("family")) s.family = topology_family_from_string(j.at("family").get<std::string>());
  read_opt(j, "n_nodes", s.n_nodes);
  read_opt(j, "er_p", s.er_p);
  read_opt(j, "ba_m", s.ba_m);
  read_opt(j, "s1_beta", s.s1_beta);
  read_opt(j, "s1_gamma", s.s1_gamma);
  read_opt(j, "s1_mean_degree", s.s1_mean_degree);
  read_opt(j, "sbm_communities", s.sbm_communities);
  read_opt(j, "sbm_p_intra", s.sbm_p_intra);
  read_opt(j, "sbm_p_inter", s.sbm_p_inter);
  read_opt(j, "modular_base_nodes", s.modular_base_nodes);
  read_opt(j, "modular_p_in", s.modular_p_in);
  read_opt(j, "modular_p_out", s.modular_p_out);
  read_opt(j, "modular_base_seed", s.modular_base_seed);
  read_opt(j, "modular_removal", s.modular_removal);
}

}  // namespace netgen

namespace dynsim {

void to_json(nlohmann::json& j, const DynamicsSpec& s) {
  j = {{"family", std::string(to_string(s.family))},
       {"mut_b", s.mut_b}, {"mut_k", s.mut_k}, {"mut_c", s.mut_c},
       {"mut_d", s.mut_d}, {"mut_e", s.mut_e}, {"mut_h", s.mut_h},
       {"reg_b", s.reg_b}, {"reg_f", s.reg_f}, {"reg_h", s.reg_h},
       {"neu_mu", s.neu_mu}, {"neu_delta", s.neu_delta}};
}

void from_json(const nlohmann::json& j, DynamicsSpec& s) {
  if (j.contains("family")) s.family = dynamics_family_from_string(j.at("family").get<std::string>());
  read_opt(j, "mut_b", s.mut_b);
  read_opt(j, "mut_k", s.mut_k);
  read_opt(j, "mut_c", s.mut_c);
  read_opt(j, "mut_d", s.mut_d);
  read_opt(j, "mut_e", s.mut_e);
  read_opt(j, "mut_h", s.mut_h);
  read_opt(j, "reg_b", s.reg_b);
  read_opt(j, "reg_f", s.reg_f);
  read_opt(j, "reg_h", s.reg_h);
  read_opt(j, "neu_mu", s.neu_mu);
  read_opt(j, "neu_delta", s.neu_delta);
}

void to_json(nlohmann::json& j, const SimConfig& s) {
  j = {{"t_max", s.t_max}, {"dt", s.dt}, {"substeps", s.substeps},
       {"high_value", s.high_value}, {"low_value", s.low_value},
       {"random_lo", s.random_lo}, {"random_hi", s.random_hi}};
}

void from_json(const nlohmann::json& j, SimConfig& s) {
  read_opt(j, "t_max", s.t_max);
  read_opt(j, "dt", s.dt);
  read_opt(j, "substeps", s.substeps);
  read_opt(j, "high_value", s.high_value);
  read_opt(j, "low_value", s.low_value);
  read_opt(j, "random_lo", s.random_lo);
  read_opt(j, "random_hi", s.random_hi);
}

void to_json(nlohmann::json& j, const LabelRule& s) {
  j = {{"r", s.r}, {"m", s.m}, {"epsilon", s.epsilon}};
}

void from_json(const nlohmann::json& j, LabelRule& s) {
  read_opt(j, "r", s.r);
  read_opt(j, "m", s.m);
  read_opt(j, "epsilon", s.epsilon);
}

}  // namespace dynsim

namespace dataset {

void to_json(nlohmann::json& j, const PoolCounts& c) {
  j = {{"n_unlabeled", c.n_unlabeled}, {"n_labeled", c.n_labeled},
       {"n_val", c.n_val}, {"n_test", c.n_test}};
}

void from_json(const nlohmann::json& j, PoolCounts& c) {
  read_opt(j, "n_unlabeled", c.n_unlabeled);
  read_opt(j, "n_labeled", c.n_labeled);
  read_opt(j, "n_val", c.n_val);
  read_opt(j, "n_test", c.n_test);
}

}  // namespace dataset
}  // namespace tdnetgen
