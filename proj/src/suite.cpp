#include "psd/suite.hpp"

#include <chrono>
#include <cmath>
#include <future>
#include <thread>

namespace psd {

std::string to_string(ScoreMode mode) {
  return mode == ScoreMode::direct ? "direct" : "knn";
}

ScoreMode score_mode_from_string(const std::string& name) {
  if (name == "direct") return ScoreMode::direct;
  if (name == "knn") return ScoreMode::knn;
  throw ConfigError("unknown score_mode '" + name + "' (expected direct or knn)");
}

DetectOutcome detect_image(const MatrixXd& Y, const DetectConfig& cfg,
                           const BoolMatrixM* ground_truth) {
  const auto t0 = std::chrono::steady_clock::now();
  DetectOutcome out;
  if (cfg.mode == ScoreMode::direct) {
    Decomposition2D dec = run_psd_2d(Y, cfg.psd);
    out.converged = dec.converged;
    out.report = threshold_mask(score_direct(dec.anomalies), cfg.threshold,
                                ground_truth);
    out.decomposition = std::move(dec);
  } else {
    ReferenceResult ref = build_reference(Y, cfg.psd, cfg.enable_rotation);
    out.converged = ref.decomposition.converged;
    out.report = threshold_mask(score_knn(Y, ref.reference, cfg.scoring),
                                cfg.threshold, ground_truth);
    out.reference = std::move(ref);
  }
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

SuiteReport run_suite(const std::vector<SynthSpec>& specs, const DetectConfig& cfg,
                      int workers) {
  if (specs.empty()) throw ConfigError("run_suite: needs at least one spec");
  const auto t0 = std::chrono::steady_clock::now();

  SuiteReport report;
  report.items.resize(specs.size());

  const auto run_one = [&](int idx) {
    SuiteItem item;
    item.index = idx;
    try {
      const auto [observed, gt] = generate(specs[idx]);
      const DetectOutcome outcome = detect_image(observed, cfg, &gt.anomaly_mask);
      item.metrics = *outcome.report.metrics;
      item.wall_seconds = outcome.wall_seconds;
      item.converged = outcome.converged;
      item.ok = true;
    } catch (const std::exception& ex) {
      item.ok = false;
      item.error = ex.what();
    }
    return item;
  };

  int pool = workers > 0 ? workers
                         : static_cast<int>(std::thread::hardware_concurrency());
  if (pool < 1) pool = 1;
  pool = std::min<int>(pool, static_cast<int>(specs.size()));

  if (pool == 1) {
    for (size_t i = 0; i < specs.size(); ++i)
      report.items[i] = run_one(static_cast<int>(i));
  } else {
    std::vector<std::future<SuiteItem>> futures;
    futures.reserve(specs.size());
    for (size_t i = 0; i < specs.size(); ++i)
      futures.push_back(
          std::async(std::launch::async, run_one, static_cast<int>(i)));
    for (size_t i = 0; i < specs.size(); ++i) report.items[i] = futures[i].get();
  }

  for (const SuiteItem& item : report.items)
    if (!item.ok) ++report.failures;
  report.mean = summarize_mean(report.items);
  report.stddev = summarize_stddev(report.items, report.mean);
  report.total_wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

MetricSummary summarize_mean(const std::vector<SuiteItem>& items) {
  MetricSummary s;
  int n = 0;
  for (const SuiteItem& item : items) {
    if (!item.ok) continue;
    s.for_rate += item.metrics.for_rate;
    s.fnr += item.metrics.fnr;
    s.ba += item.metrics.ba;
    s.dice += item.metrics.dice;
    ++n;
  }
  if (n > 0) {
    s.for_rate /= n;
    s.fnr /= n;
    s.ba /= n;
    s.dice /= n;
  }
  return s;
}

MetricSummary summarize_stddev(const std::vector<SuiteItem>& items,
                               const MetricSummary& mean) {
  MetricSummary s;
  int n = 0;
  for (const SuiteItem& item : items) {
    if (!item.ok) continue;
    s.for_rate += (item.metrics.for_rate - mean.for_rate) *
                  (item.metrics.for_rate - mean.for_rate);
    s.fnr += (item.metrics.fnr - mean.fnr) * (item.metrics.fnr - mean.fnr);
    s.ba += (item.metrics.ba - mean.ba) * (item.metrics.ba - mean.ba);
    s.dice += (item.metrics.dice - mean.dice) * (item.metrics.dice - mean.dice);
    ++n;
  }
  if (n > 1) {
    s.for_rate = std::sqrt(s.for_rate / (n - 1));
    s.fnr = std::sqrt(s.fnr / (n - 1));
    s.ba = std::sqrt(s.ba / (n - 1));
    s.dice = std::sqrt(s.dice / (n - 1));
  } else {
    s = MetricSummary{};
  }
  return s;
}

nlohmann::json metrics_json(const MetricSet& m) {
  return {{"FOR", m.for_rate}, {"FNR", m.fnr},    {"BA", m.ba}, {"DICE", m.dice},
          {"TP", m.tp},        {"FP", m.fp},      {"TN", m.tn}, {"FN", m.fn}};
}

nlohmann::json suite_report_json(const SuiteReport& report) {
  nlohmann::json per_image = nlohmann::json::array();
  for (const SuiteItem& item : report.items) {
    nlohmann::json row{{"index", item.index},
                       {"ok", item.ok},
                       {"wall_seconds", item.wall_seconds},
                       {"converged", item.converged}};
    if (item.ok)
      row["metrics"] = metrics_json(item.metrics);
    else
      row["error"] = item.error;
    per_image.push_back(std::move(row));
  }
  const auto summary = [](const MetricSummary& s) {
    return nlohmann::json{
        {"FOR", s.for_rate}, {"FNR", s.fnr}, {"BA", s.ba}, {"DICE", s.dice}};
  };
  return {{"per_image", per_image},
          {"mean", summary(report.mean)},
          {"stddev", summary(report.stddev)},
          {"failures", report.failures},
          {"total_wall_seconds", report.total_wall_seconds}};
}

}  // namespace psd
