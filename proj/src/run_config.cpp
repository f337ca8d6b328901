#include "psd/run_config.hpp"

#include <fstream>

namespace psd {

namespace {

using nlohmann::json;

SynthSpec::Background background_from_string(const std::string& name) {
  if (name == "sinusoidal") return SynthSpec::Background::sinusoidal;
  if (name == "rectangles") return SynthSpec::Background::rectangles;
  throw ConfigError("unknown synth_background '" + name +
                    "' (expected sinusoidal or rectangles)");
}

std::string background_to_string(SynthSpec::Background b) {
  return b == SynthSpec::Background::sinusoidal ? "sinusoidal" : "rectangles";
}

AnomalySpec anomaly_from_json(const json& j) {
  AnomalySpec a;
  const std::string shape = j.value("shape", "rect");
  if (shape == "rect")
    a.shape = AnomalySpec::Shape::rect;
  else if (shape == "disk")
    a.shape = AnomalySpec::Shape::disk;
  else
    throw ConfigError("unknown anomaly shape '" + shape + "'");
  a.center_row = j.at("row").get<int>();
  a.center_col = j.at("col").get<int>();
  a.height = j.value("height", 8);
  a.width = j.value("width", a.height);
  a.amplitude = j.value("amplitude", 0.5);
  for (const auto& [key, _] : j.items())
    if (key != "shape" && key != "row" && key != "col" && key != "height" &&
        key != "width" && key != "amplitude")
      throw ConfigError("unknown anomaly key '" + key + "'");
  return a;
}

json anomaly_to_json(const AnomalySpec& a) {
  return {{"shape", a.shape == AnomalySpec::Shape::rect ? "rect" : "disk"},
          {"row", a.center_row},
          {"col", a.center_col},
          {"height", a.height},
          {"width", a.width},
          {"amplitude", a.amplitude}};
}

template <typename T>
void assign(const json& value, T& out, const std::string& key) {
  try {
    out = value.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for config key '" + key + "'");
  }
}

void apply_key(RunConfig& cfg, const std::string& key, const json& value) {
  auto& p = cfg.psd;
  auto& s = cfg.scoring;
  auto& y = cfg.synth;
  if (key == "rho1") assign(value, p.penalties.rho1, key);
  else if (key == "rho2") assign(value, p.penalties.rho2, key);
  else if (key == "beta1") assign(value, p.penalties.beta1, key);
  else if (key == "beta2") assign(value, p.penalties.beta2, key);
  else if (key == "guard_p") assign(value, p.guard_p, key);
  else if (key == "eps_conv") assign(value, p.eps_conv, key);
  else if (key == "inner_K") assign(value, p.inner_K, key);
  else if (key == "max_outer") assign(value, p.max_outer, key);
  else if (key == "max_lambda_blocks") assign(value, p.max_lambda_blocks, key);
  else if (key == "adam_step") assign(value, p.adam.step_size, key);
  else if (key == "adam_decay1") assign(value, p.adam.decay1, key);
  else if (key == "adam_decay2") assign(value, p.adam.decay2, key);
  else if (key == "adam_eps") assign(value, p.adam.eps_adam, key);
  else if (key == "steps_per_block") assign(value, p.adam.steps_per_block, key);
  else if (key == "value_check_every") assign(value, p.adam.value_check_every, key);
  else if (key == "stall_patience") assign(value, p.adam.stall_patience, key);
  else if (key == "patch_edge") assign(value, s.patch_edge, key);
  else if (key == "stride") assign(value, s.stride, key);
  else if (key == "knn_k") assign(value, s.knn_k, key);
  else if (key == "eps_sigma") assign(value, s.eps_sigma, key);
  else if (key == "kernel_sigma") assign(value, s.kernel_sigma, key);
  else if (key == "score_mode") {
    std::string名;
    assign(value, 名, key);
    cfg.score_mode = score_mode_from_string(名);
  } else if (key == "threshold") assign(value, cfg.threshold, key);
  else if (key == "enable_rotation") assign(value, cfg.enable_rotation, key);
  else if (key == "seed") assign(value, cfg.seed, key);
  else if (key == "resize_to") assign(value, cfg.resize_to, key);
  else if (key == "workers") assign(value, cfg.workers, key);
  else if (key == "out_dir") assign(value, cfg.out_dir, key);
  else if (key == "debug_intermediates") assign(value, cfg.debug_intermediates, key);
  else if (key == "synth_n") assign(value, y.n, key);
  else if (key == "synth_background") {
    std::string name;
    assign(value, name, key);
    y.background = background_from_string(name);
  } else if (key == "synth_t1") assign(value, y.t1, key);
  else if (key == "synth_t2") assign(value, y.t2, key);
  else if (key == "synth_sin_scale") assign(value, y.sin_scale, key);
  else if (key == "synth_sin_offset") assign(value, y.sin_offset, key);
  else if (key == "synth_rect_width") assign(value, y.rect_width, key);
  else if (key == "synth_rect_height") assign(value, y.rect_height, key);
  else if (key == "synth_rect_hi") assign(value, y.rect_hi, key);
  else if (key == "synth_rect_lo") assign(value, y.rect_lo, key);
  else if (key == "synth_noise_sigma") assign(value, y.noise_sigma, key);
  else if (key == "synth_anomalies") {
    if (!value.is_array()) throw ConfigError("synth_anomalies must be an array");
    y.anomalies.clear();
    for (const json& item : value) y.anomalies.push_back(anomaly_from_json(item));
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

}  // namespace

void RunConfig::validate() const {
  psd.validate();
  if (scoring.patch_edge < 1 || scoring.stride < 1 || scoring.knn_k < 2)
    throw ConfigError("scoring parameters out of range");
  if (scoring.eps_sigma <= 0 || scoring.kernel_sigma <= 0)
    throw ConfigError("scoring epsilons must be > 0");
  if (threshold < 0) throw ConfigError("threshold must be >= 0");
  if (resize_to < 0) throw ConfigError("resize_to must be >= 0");
  if (workers < 0) throw ConfigError("workers must be >= 0");
  synth.validate();
}

RunConfig config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config root must be an object");
  RunConfig cfg;
  for (const auto& [key, value] : doc.items()) apply_key(cfg, key, value);
  cfg.synth.seed = cfg.seed;
  cfg.validate();
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError("config parse error in " + path + ": " + ex.what());
  }
  return config_from_json(doc);
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override must look like key=value: " + assignment);
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  nlohmann::json value;
  try {
    value = nlohmann::json::parse(raw);
  } catch (const nlohmann::json::exception&) {
    value = raw;  // unquoted strings (e.g. score_mode=knn)
  }
  apply_key(cfg, key, value);
  cfg.synth.seed = cfg.seed;
  cfg.validate();
}

nlohmann::json config_json(const RunConfig& cfg) {
  nlohmann::json anomalies = nlohmann::json::array();
  for (const AnomalySpec& a : cfg.synth.anomalies) anomalies.push_back(anomaly_to_json(a));
  return {
      {"rho1", cfg.psd.penalties.rho1},
      {"rho2", cfg.psd.penalties.rho2},
      {"beta1", cfg.psd.penalties.beta1},
      {"beta2", cfg.psd.penalties.beta2},
      {"guard_p", cfg.psd.guard_p},
      {"eps_conv", cfg.psd.eps_conv},
      {"inner_K", cfg.psd.inner_K},
      {"max_outer", cfg.psd.max_outer},
      {"max_lambda_blocks", cfg.psd.max_lambda_blocks},
      {"adam_step", cfg.psd.adam.step_size},
      {"adam_decay1", cfg.psd.adam.decay1},
      {"adam_decay2", cfg.psd.adam.decay2},
      {"adam_eps", cfg.psd.adam.eps_adam},
      {"steps_per_block", cfg.psd.adam.steps_per_block},
      {"value_check_every", cfg.psd.adam.value_check_every},
      {"stall_patience", cfg.psd.adam.stall_patience},
      {"patch_edge", cfg.scoring.patch_edge},
      {"stride", cfg.scoring.stride},
      {"knn_k", cfg.scoring.knn_k},
      {"eps_sigma", cfg.scoring.eps_sigma},
      {"kernel_sigma", cfg.scoring.kernel_sigma},
      {"score_mode", to_string(cfg.score_mode)},
      {"threshold", cfg.threshold},
      {"enable_rotation", cfg.enable_rotation},
      {"seed", cfg.seed},
      {"resize_to", cfg.resize_to},
      {"workers", cfg.workers},
      {"out_dir", cfg.out_dir},
      {"debug_intermediates", cfg.debug_intermediates},
      {"synth_n", cfg.synth.n},
      {"synth_background", background_to_string(cfg.synth.background)},
      {"synth_t1", cfg.synth.t1},
      {"synth_t2", cfg.synth.t2},
      {"synth_sin_scale", cfg.synth.sin_scale},
      {"synth_sin_offset", cfg.synth.sin_offset},
      {"synth_rect_width", cfg.synth.rect_width},
      {"synth_rect_height", cfg.synth.rect_height},
      {"synth_rect_hi", cfg.synth.rect_hi},
      {"synth_rect_lo", cfg.synth.rect_lo},
      {"synth_noise_sigma", cfg.synth.noise_sigma},
      {"synth_anomalies", anomalies},
  };
}

}  // namespace psd
