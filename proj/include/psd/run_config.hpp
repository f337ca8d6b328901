#pragma once

#include <string>

#include <json.hpp>

#include "psd/suite.hpp"
#include "psd/synthetic.hpp"

namespace psd {

/// One flat document drives every command; the CLI overlays its flags after
/// the file loads. Unknown keys are rejected.
struct RunConfig {
  PsdConfig psd;
  ScoreConfig scoring;
  ScoreMode score_mode = ScoreMode::knn;
  double threshold = 2.0;
  bool enable_rotation = true;
  uint64_t seed = 0;
  int resize_to = 0;  // 0 = keep the native size
  int workers = 0;    // 0 = hardware default
  std::string out_dir = "out";
  bool debug_intermediates = false;
  SynthSpec synth;

  DetectConfig detect_config() const {
    DetectConfig d;
    d.psd = psd;
    d.scoring = scoring;
    d.mode = score_mode;
    d.enable_rotation = enable_rotation;
    d.threshold = threshold;
    return d;
  }

  void validate() const;
};

RunConfig config_from_json(const nlohmann::json& doc);
RunConfig load_config_file(const std::string& path);

/// Apply one "key=value" override (same keys as the file).
void apply_override(RunConfig& cfg, const std::string& assignment);

/// Full echo of the effective configuration, for run summaries.
nlohmann::json config_json(const RunConfig& cfg);

}  // namespace psd
