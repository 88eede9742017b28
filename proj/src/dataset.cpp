#include "tdnetgen/dataset.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "tdnetgen/error.hpp"
#include "tdnetgen/random.hpp"
#include "tdnetgen/spec_json.hpp"

namespace tdnetgen::dataset {

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "array files are written in host order; big-endian hosts need byte swapping");

Observations observe(const dynsim::Trajectory& traj, int t_obs) {
  if (t_obs < 1 || t_obs > traj.n_time)
    throw DomainError("observe: t_obs must lie in [1, " + std::to_string(traj.n_time) + "]");
  Observations obs(traj.n_traj, traj.n_nodes, t_obs);
  for (int m = 0; m < traj.n_traj; ++m)
    for (int i = 0; i < traj.n_nodes; ++i)
      for (int t = 0; t < t_obs; ++t) obs.at(m, i, t) = static_cast<float>(traj.at(m, i, t));
  return obs;
}

std::string_view to_string(LabelSource source) {
  switch (source) {
    case LabelSource::NONE: return "none";
    case LabelSource::SIMULATED: return "simulated";
    case LabelSource::PSEUDO: return "pseudo";
    case LabelSource::THEORY: return "theory";
    case LabelSource::GUIDED: return "guided";
  }
  return "none";
}

LabelSource label_source_from_string(std::string_view name) {
  for (auto s : {LabelSource::NONE, LabelSource::SIMULATED, LabelSource::PSEUDO,
                 LabelSource::THEORY, LabelSource::GUIDED})
    if (to_string(s) == name) return s;
  throw IoError("unknown label source '" + std::string(name) + "'");
}

NetworkSample truncate_observations(const NetworkSample& sample, int t_obs) {
  if (t_obs < 1 || t_obs > sample.obs.n_time)
    throw DomainError("truncate_observations: t_obs " + std::to_string(t_obs) +
                      " outside [1, " + std::to_string(sample.obs.n_time) + "]");
  NetworkSample out = sample;
  Observations obs(sample.obs.n_traj, sample.obs.n_nodes, t_obs);
  for (int m = 0; m < obs.n_traj; ++m)
    for (int i = 0; i < obs.n_nodes; ++i)
      for (int t = 0; t < t_obs; ++t) obs.at(m, i, t) = sample.obs.at(m, i, t);
  out.obs = std::move(obs);
  return out;
}

// =============================================================================
// Building
// =============================================================================

namespace {

constexpr std::uint64_t kPoolStream = 0x706f6f6c;

NetworkSample simulate_one(const Provenance& prov, std::int64_t id, std::uint64_t sample_seed,
                           bool keep_full) {
  NetworkSample s;
  s.id = id;
  s.graph = netgen::generate_topology(prov.topology, derive_seed(sample_seed, 1));
  auto traj = dynsim::simulate_sample(s.graph, prov.dynamics, prov.sim, derive_seed(sample_seed, 2));
  s.obs = observe(traj, prov.t_obs);
  s.label = dynsim::label_resilience(traj, prov.dynamics.family, prov.rule);
  s.label_source = LabelSource::SIMULATED;
  if (keep_full) s.full_trajectory = std::move(traj);
  return s;
}

}  // namespace

DatasetSplit build_dataset(const netgen::TopologySpec& topology, const dynsim::DynamicsSpec& dynamics,
                           const dynsim::SimConfig& sim, const dynsim::LabelRule& rule,
                           const PoolCounts& counts, int t_obs, std::uint64_t seed,
                           const BuildOptions& options) {
  topology.validate();
  dynamics.validate();
  sim.validate();
  rule.validate();
  if (counts.n_unlabeled < 1 || counts.n_labeled < 1 || counts.n_val < 1 || counts.n_test < 1)
    throw ConfigError("build_dataset: every pool count must be positive");
  if (t_obs < 2) throw ConfigError("build_dataset: t_obs must be >= 2");
  if (t_obs > sim.n_time_points())
    throw ConfigError("build_dataset: t_obs exceeds the simulated horizon");

  DatasetSplit split;
  Provenance& prov = split.provenance;
  prov.topology = topology;
  prov.dynamics = dynamics;
  prov.sim = sim;
  prov.rule = rule;
  prov.counts = counts;
  prov.t_obs = t_obs;
  prov.seed = seed;

  const int total = counts.total();
  std::vector<NetworkSample> samples;
  samples.reserve(total);
  for (std::int64_t id = 0; id < total; ++id) {
    for (int attempt = 0;; ++attempt) {
      const std::uint64_t sample_seed = derive_seed(seed, static_cast<std::uint64_t>(id), attempt);
      try {
        samples.push_back(simulate_one(prov, id, sample_seed, options.keep_full_trajectories));
        prov.sample_seeds[id] = sample_seed;
        break;
      } catch (const SimulationDiverged& e) {
        if (attempt >= options.max_retries)
          throw SimulationDiverged(e.time_index(), "build_dataset: sample " + std::to_string(id) +
                                                       " diverged after retries");
      }
    }
  }

  std::vector<std::int64_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, kPoolStream));
  std::shuffle(order.begin(), order.end(), rng);

  auto take = [&](std::size_t begin, int n, std::vector<NetworkSample>& pool) {
    std::vector<std::int64_t> ids(order.begin() + begin, order.begin() + begin + n);
    std::sort(ids.begin(), ids.end());
    for (auto id : ids) pool.push_back(samples[id]);
  };
  std::size_t cursor = 0;
  take(cursor, counts.n_labeled, split.labeled);
  cursor += counts.n_labeled;
  take(cursor, counts.n_unlabeled, split.unlabeled);
  cursor += counts.n_unlabeled;
  take(cursor, counts.n_val, split.validation);
  cursor += counts.n_val;
  take(cursor, counts.n_test, split.test);

  for (auto& s : split.unlabeled) {
    prov.audit_labels[s.id] = *s.label;
    s.label.reset();
    s.label_source = LabelSource::NONE;
  }

  const auto balance = class_balance(split.labeled);
  if (balance.resilient == 0 || balance.non_resilient == 0)
    throw DomainError("build_dataset: labeled pool holds a single class (" +
                      std::to_string(balance.resilient) + " resilient, " +
                      std::to_string(balance.non_resilient) + " non-resilient)");
  return split;
}

NetworkSample resimulate(const Provenance& prov, std::int64_t id) {
  const auto it = prov.sample_seeds.find(id);
  if (it == prov.sample_seeds.end()) throw DomainError("resimulate: unknown sample id");
  return simulate_one(prov, id, it->second, true);
}

ClassBalance class_balance(const std::vector<NetworkSample>& samples) {
  ClassBalance b;
  for (const auto& s : samples) {
    if (!s.label) continue;
    if (*s.label == Resilience::RESILIENT) ++b.resilient;
    else ++b.non_resilient;
  }
  return b;
}

// =============================================================================
// Array files
// =============================================================================

namespace {

constexpr std::array<char, 4> kArrayMagic{'T', 'D', 'A', '1'};

template <typename T>
void write_array(const fs::path& path, std::uint8_t dtype, const std::vector<std::int64_t>& shape,
                 const std::vector<T>& data) {
  std::int64_t count = 1;
  for (auto d : shape) count *= d;
  if (count != static_cast<std::int64_t>(data.size()))
    throw IoError("write_array: shape does not match data size for " + path.string());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write(kArrayMagic.data(), kArrayMagic.size());
  const std::uint8_t header[4] = {dtype, static_cast<std::uint8_t>(shape.size()), 0, 0};
  os.write(reinterpret_cast<const char*>(header), sizeof header);
  for (auto d : shape) os.write(reinterpret_cast<const char*>(&d), sizeof d);
  os.write(reinterpret_cast<const char*>(data.data()),
           static_cast<std::streamsize>(data.size() * sizeof(T)));
  if (!os) throw IoError("write failed for " + path.string());
}

template <typename T>
std::vector<T> read_array(const fs::path& path, std::uint8_t dtype, std::vector<std::int64_t>& shape) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  std::array<char, 4> magic{};
  std::uint8_t header[4] = {};
  is.read(magic.data(), magic.size());
  is.read(reinterpret_cast<char*>(header), sizeof header);
  if (!is || magic != kArrayMagic) throw IoError("corrupt array file (bad magic): " + path.string());
  if (header[0] != dtype) throw IoError("array file has unexpected dtype: " + path.string());
  shape.assign(header[1], 0);
  std::int64_t count = 1;
  for (auto& d : shape) {
    is.read(reinterpret_cast<char*>(&d), sizeof d);
    if (!is || d < 0) throw IoError("corrupt array file (truncated shape): " + path.string());
    count *= d;
  }
  std::vector<T> data(static_cast<std::size_t>(count));
  is.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(T)));
  if (!is) throw IoError("corrupt array file (truncated payload): " + path.string());
  if (is.peek() != std::ifstream::traits_type::eof())
    throw IoError("corrupt array file (trailing bytes): " + path.string());
  return data;
}

}  // namespace

void write_array_f32(const fs::path& path, const std::vector<std::int64_t>& shape,
                     const std::vector<float>& data) {
  write_array(path, 1, shape, data);
}
void write_array_f64(const fs::path& path, const std::vector<std::int64_t>& shape,
                     const std::vector<double>& data) {
  write_array(path, 2, shape, data);
}
std::vector<float> read_array_f32(const fs::path& path, std::vector<std::int64_t>& shape) {
  return read_array<float>(path, 1, shape);
}
std::vector<double> read_array_f64(const fs::path& path, std::vector<std::int64_t>& shape) {
  return read_array<double>(path, 2, shape);
}

// =============================================================================
// Dataset directories
// =============================================================================

namespace {

std::string label_name(Resilience r) {
  return r == Resilience::RESILIENT ? "resilient" : "non_resilient";
}

Resilience parse_label(const std::string& s, const fs::path& where) {
  if (s == "resilient") return Resilience::RESILIENT;
  if (s == "non_resilient") return Resilience::NON_RESILIENT;
  throw IoError("bad label '" + s + "' in " + where.string());
}

void write_sample(const NetworkSample& s, const fs::path& root) {
  const fs::path dir = root / "samples" / std::to_string(s.id);
  fs::create_directories(dir);
  {
    std::ofstream os(dir / "graph.edges", std::ios::trunc);
    if (!os) throw IoError("cannot write " + (dir / "graph.edges").string());
    netgen::write_edge_list(os, s.graph);
  }
  write_array_f32(dir / "obs.f32", {s.obs.n_traj, s.obs.n_nodes, s.obs.n_time}, s.obs.values);
  if (s.label) {
    std::ofstream os(dir / "label.txt", std::ios::trunc);
    os << label_name(*s.label) << ' ' << to_string(s.label_source) << '\n';
  }
  if (s.full_trajectory) {
    const auto& tr = *s.full_trajectory;
    write_array_f64(dir / "traj.f64", {tr.n_traj, tr.n_nodes, tr.n_time}, tr.states);
    write_array_f64(dir / "times.f64", {tr.n_time}, tr.times);
  }
}

NetworkSample read_sample(const fs::path& root, std::int64_t id) {
  const fs::path dir = root / "samples" / std::to_string(id);
  if (!fs::is_directory(dir)) throw IoError("missing sample directory " + dir.string());
  NetworkSample s;
  s.id = id;
  {
    std::ifstream is(dir / "graph.edges");
    if (!is) throw IoError("missing " + (dir / "graph.edges").string());
    s.graph = netgen::read_edge_list(is);
  }
  std::vector<std::int64_t> shape;
  s.obs.values = read_array_f32(dir / "obs.f32", shape);
  if (shape.size() != 3) throw IoError("obs.f32 must be 3-D in " + dir.string());
  s.obs.n_traj = static_cast<int>(shape[0]);
  s.obs.n_nodes = static_cast<int>(shape[1]);
  s.obs.n_time = static_cast<int>(shape[2]);
  if (s.obs.n_nodes != s.graph.n_nodes())
    throw IoError("observation node count disagrees with graph in " + dir.string());
  if (fs::exists(dir / "label.txt")) {
    std::ifstream is(dir / "label.txt");
    std::string name, source;
    if (!(is >> name >> source)) throw IoError("corrupt label.txt in " + dir.string());
    s.label = parse_label(name, dir);
    s.label_source = label_source_from_string(source);
  }
  if (fs::exists(dir / "traj.f64")) {
    dynsim::Trajectory tr;
    tr.states = read_array_f64(dir / "traj.f64", shape);
    if (shape.size() != 3) throw IoError("traj.f64 must be 3-D in " + dir.string());
    tr.n_traj = static_cast<int>(shape[0]);
    tr.n_nodes = static_cast<int>(shape[1]);
    tr.n_time = static_cast<int>(shape[2]);
    tr.times = read_array_f64(dir / "times.f64", shape);
    s.full_trajectory = std::move(tr);
  }
  return s;
}

json ids_of(const std::vector<NetworkSample>& pool) {
  json a = json::array();
  for (const auto& s : pool) a.push_back(s.id);
  return a;
}

json read_manifest(const fs::path& dir) {
  std::ifstream is(dir / "manifest.json");
  if (!is) throw IoError("missing manifest.json in " + dir.string());
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw IoError("corrupt manifest.json in " + dir.string() + ": " + e.what());
  }
}

void write_manifest(const json& manifest, const fs::path& dir) {
  std::ofstream os(dir / "manifest.json", std::ios::trunc);
  if (!os) throw IoError("cannot write manifest in " + dir.string());
  os << manifest.dump(2) << '\n';
}

}  // namespace

void save_dataset(const DatasetSplit& split, const fs::path& dir) {
  fs::create_directories(dir);
  const Provenance& p = split.provenance;
  json seeds = json::array();
  for (auto [id, s] : p.sample_seeds) seeds.push_back({id, s});
  json audit = json::array();
  for (auto [id, l] : p.audit_labels) audit.push_back({id, label_name(l)});
  json manifest = {
      {"schema_version", kDatasetSchemaVersion},
      {"kind", "dataset"},
      {"topology", p.topology},
      {"dynamics", p.dynamics},
      {"sim", p.sim},
      {"label_rule", p.rule},
      {"counts", p.counts},
      {"t_obs", p.t_obs},
      {"seed", p.seed},
      {"sample_seeds", seeds},
      {"audit_labels", audit},
      {"pools",
       {{"labeled", ids_of(split.labeled)},
        {"unlabeled", ids_of(split.unlabeled)},
        {"validation", ids_of(split.validation)},
        {"test", ids_of(split.test)}}}};
  write_manifest(manifest, dir);
  for (const auto* pool : {&split.labeled, &split.unlabeled, &split.validation, &split.test})
    for (const auto& s : *pool) write_sample(s, dir);
}

DatasetSplit load_dataset(const fs::path& dir) {
  const json m = read_manifest(dir);
  try {
    const int version = m.at("schema_version").get<int>();
    if (version != kDatasetSchemaVersion)
      throw IoError("dataset schema version " + std::to_string(version) + " unsupported (expected " +
                    std::to_string(kDatasetSchemaVersion) + ")");
    if (m.at("kind").get<std::string>() != "dataset")
      throw IoError(dir.string() + " holds a sample pool, not a dataset");
    DatasetSplit split;
    Provenance& p = split.provenance;
    m.at("topology").get_to(p.topology);
    m.at("dynamics").get_to(p.dynamics);
    m.at("sim").get_to(p.sim);
    m.at("label_rule").get_to(p.rule);
    m.at("counts").get_to(p.counts);
    p.t_obs = m.at("t_obs").get<int>();
    p.seed = m.at("seed").get<std::uint64_t>();
    for (const auto& e : m.at("sample_seeds"))
      p.sample_seeds[e.at(0).get<std::int64_t>()] = e.at(1).get<std::uint64_t>();
    for (const auto& e : m.at("audit_labels"))
      p.audit_labels[e.at(0).get<std::int64_t>()] = parse_label(e.at(1).get<std::string>(), dir);
    const auto& pools = m.at("pools");
    auto load_pool = [&](const char* name, std::vector<NetworkSample>& out) {
      for (const auto& id : pools.at(name)) out.push_back(read_sample(dir, id.get<std::int64_t>()));
    };
    load_pool("labeled", split.labeled);
    load_pool("unlabeled", split.unlabeled);
    load_pool("validation", split.validation);
    load_pool("test", split.test);
    return split;
  } catch (const json::exception& e) {
    throw IoError("corrupt manifest.json in " + dir.string() + ": " + e.what());
  }
}

void save_samples(const std::vector<NetworkSample>& samples, const fs::path& dir,
                  const std::string& kind) {
  fs::create_directories(dir);
  json manifest = {{"schema_version", kDatasetSchemaVersion}, {"kind", kind}, {"ids", ids_of(samples)}};
  write_manifest(manifest, dir);
  for (const auto& s : samples) write_sample(s, dir);
}

std::vector<NetworkSample> load_samples(const fs::path& dir) {
  const json m = read_manifest(dir);
  try {
    if (m.at("schema_version").get<int>() != kDatasetSchemaVersion)
      throw IoError("sample pool schema version unsupported in " + dir.string());
    std::vector<NetworkSample> out;
    for (const auto& id : m.at("ids")) out.push_back(read_sample(dir, id.get<std::int64_t>()));
    return out;
  } catch (const json::exception& e) {
    throw IoError("corrupt manifest.json in " + dir.string() + ": " + e.what());
  }
}

}  // namespace tdnetgen::dataset
