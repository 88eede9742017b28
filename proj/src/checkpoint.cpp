#include "tdnetgen/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "tdnetgen/error.hpp"

namespace tdnetgen::checkpoint {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'T', 'D', 'C', 'K'};

struct Raw {
  json header;
  std::string blob;
};

Raw read_raw(const fs::path& path, bool with_blob) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("checkpoint: cannot open " + path.string());
  char magic[4];
  std::uint32_t version = 0;
  std::uint64_t len = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  in.read(reinterpret_cast<char*>(&len), sizeof len);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw IoError("checkpoint: bad magic in " + path.string());
  if (version != kFormatVersion) throw IoError("checkpoint: unsupported version " + std::to_string(version));
  if (len > (1u << 26)) throw IoError("checkpoint: header too large in " + path.string());
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (!in) throw IoError("checkpoint: truncated header in " + path.string());
  Raw raw;
  try {
    raw.header = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError("checkpoint: malformed header in " + path.string() + ": " + e.what());
  }
  if (with_blob) raw.blob.assign(std::istreambuf_iterator<char>(in), {});
  return raw;
}

}  // namespace

void save_module(const fs::path& path, const std::string& kind, const json& meta, const torch::nn::Module& module) {
  json header = {{"kind", kind}, {"meta", meta}};
  const std::string text = header.dump();
  torch::serialize::OutputArchive archive;
  module.save(archive);
  std::ostringstream blob;
  archive.save_to(blob);

  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("checkpoint: cannot write " + tmp.string());
    const std::uint32_t version = kFormatVersion;
    const std::uint64_t len = text.size();
    out.write(kMagic, 4);
    out.write(reinterpret_cast<const char*>(&version), sizeof version);
    out.write(reinterpret_cast<const char*>(&len), sizeof len);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    const std::string bytes = blob.str();
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("checkpoint: write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

json read_header(const fs::path& path) { return read_raw(path, false).header; }

namespace {

void check_kind(const json& header, const fs::path& path, const std::string& kind) {
  const auto found = header.value("kind", std::string{});
  if (found != kind)
    throw IoError("checkpoint: " + path.string() + " holds '" + found + "', expected '" + kind + "'");
  if (!header.contains("meta") || !header["meta"].is_object())
    throw IoError("checkpoint: " + path.string() + " has no hyperparameter block");
}

// Header hyperparameters of a checkpoint of the given kind.
json meta_of(const fs::path& path, const std::string& kind) {
  auto header = read_header(path);
  check_kind(header, path, kind);
  return header["meta"];
}

template <class F>
auto parse_meta(const fs::path& path, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw IoError("checkpoint: bad hyperparameters in " + path.string() + ": " + e.what());
  }
}

}  // namespace

json load_module(const fs::path& path, const std::string& kind, torch::nn::Module& module) {
  auto raw = read_raw(path, true);
  check_kind(raw.header, path, kind);
  try {
    torch::serialize::InputArchive archive;
    std::istringstream blob(raw.blob);
    archive.load_from(blob);
    module.load(archive);
  } catch (const c10::Error& e) {
    throw IoError("checkpoint: corrupt weights in " + path.string() + ": " + e.what_without_backtrace());
  }
  return raw.header.at("meta");
}

void save_denoiser(const fs::path& path, const diffusion::Denoiser& model, const diffusion::NoiseSchedule& schedule) {
  const auto& c = model->config();
  json meta = {{"layers", c.layers},
               {"heads", c.heads},
               {"d_node", c.d_node},
               {"d_edge", c.d_edge},
               {"d_time", c.d_time},
               {"ffn_mult", c.ffn_mult},
               {"schedule",
                {{"steps", schedule.steps()},
                 {"density", schedule.density()},
                 {"retention", schedule.retention_coefficients()}}}};
  save_module(path, "denoiser", meta, *model);
}

LoadedDenoiser load_denoiser(const fs::path& path) {
  const auto meta = meta_of(path, "denoiser");
  LoadedDenoiser out;
  const auto c = parse_meta(path, [&] {
    diffusion::DenoiserConfig c;
    c.layers = meta.at("layers");
    c.heads = meta.at("heads");
    c.d_node = meta.at("d_node");
    c.d_edge = meta.at("d_edge");
    c.d_time = meta.at("d_time");
    c.ffn_mult = meta.at("ffn_mult");
    const auto& s = meta.at("schedule");
    out.schedule = diffusion::NoiseSchedule::from_retention(s.at("retention").get<std::vector<double>>(),
                                                            s.at("density").get<double>());
    return c;
  });
  out.model = diffusion::Denoiser(c);
  load_module(path, "denoiser", *out.model);
  out.model->eval();
  return out;
}

void save_dynamics(const fs::path& path, const dynlearn::DynamicsNet& model) {
  const auto& c = model->config();
  save_module(path, "dynamics", {{"d_hidden", c.d_hidden}, {"gnn_layers", c.gnn_layers}}, *model);
}

dynlearn::DynamicsNet load_dynamics(const fs::path& path) {
  const auto meta = meta_of(path, "dynamics");
  dynlearn::DynamicsNet model(parse_meta(path, [&] {
    dynlearn::DynLearnConfig c;
    c.d_hidden = meta.at("d_hidden");
    c.gnn_layers = meta.at("gnn_layers");
    return c;
  }));
  load_module(path, "dynamics", *model);
  model->eval();
  return model;
}

void save_predictor(const fs::path& path, const predictor::Predictor& model) {
  const auto& c = model->config();
  save_module(path, "predictor",
              {{"d_embed", c.d_embed},
               {"heads", c.heads},
               {"encoder_layers", c.encoder_layers},
               {"gcn_layers", c.gcn_layers},
               {"max_time", c.max_time},
               {"n_traj", c.n_traj},
               {"attn_hidden", c.attn_hidden}},
              *model);
}

predictor::Predictor load_predictor(const fs::path& path) {
  const auto meta = meta_of(path, "predictor");
  predictor::Predictor model(parse_meta(path, [&] {
    predictor::PredictorConfig c;
    c.d_embed = meta.at("d_embed");
    c.heads = meta.at("heads");
    c.encoder_layers = meta.at("encoder_layers");
    c.gcn_layers = meta.at("gcn_layers");
    c.max_time = meta.at("max_time");
    c.n_traj = meta.at("n_traj");
    c.attn_hidden = meta.at("attn_hidden");
    return c;
  }));
  load_module(path, "predictor", *model);
  model->eval();
  return model;
}

}  // namespace tdnetgen::checkpoint
