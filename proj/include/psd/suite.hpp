#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "psd/decompose.hpp"
#include "psd/geometry.hpp"
#include "psd/scoring.hpp"
#include "psd/synthetic.hpp"

namespace psd {

enum class ScoreMode { direct, knn };

std::string to_string(ScoreMode mode);
ScoreMode score_mode_from_string(const std::string& name);

/// Everything one detection run needs.
struct DetectConfig {
  PsdConfig psd;
  ScoreConfig scoring;
  ScoreMode mode = ScoreMode::knn;
  bool enable_rotation = true;
  double threshold = 2.0;
};

struct DetectOutcome {
  DetectionReport report;
  // knn mode keeps the full reference pipeline; direct mode only the
  // decomposition.
  std::optional<ReferenceResult> reference;
  std::optional<Decomposition2D> decomposition;
  double wall_seconds = 0.0;
  bool converged = true;
};

/// One image through the configured pipeline. direct: decomposition +
/// |A|-based score; knn: reference construction + patch scoring.
DetectOutcome detect_image(const MatrixXd& Y, const DetectConfig& cfg,
                           const BoolMatrixM* ground_truth = nullptr);

struct SuiteItem {
  int index = 0;
  bool ok = false;
  std::string error;
  MetricSet metrics;
  double wall_seconds = 0.0;
  bool converged = true;
};

struct MetricSummary {
  double for_rate = 0, fnr = 0, ba = 0, dice = 0;
};

struct SuiteReport {
  std::vector<SuiteItem> items;
  MetricSummary mean;
  MetricSummary stddev;
  int failures = 0;
  double total_wall_seconds = 0.0;
};

/// Generate each spec, run the pipeline, and score against the known mask.
/// Items run in parallel workers (0 = hardware default) and are merged in
/// spec order. Per-item failures are recorded and the suite continues.
SuiteReport run_suite(const std::vector<SynthSpec>& specs, const DetectConfig& cfg,
                      int workers = 0);

MetricSummary summarize_mean(const std::vector<SuiteItem>& items);
MetricSummary summarize_stddev(const std::vector<SuiteItem>& items,
                               const MetricSummary& mean);

nlohmann::json metrics_json(const MetricSet& m);
nlohmann::json suite_report_json(const SuiteReport& report);

}  // namespace psd
