#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "psd/metrics.hpp"
#include "psd/rng.hpp"

namespace psd {

struct AnomalySpec {
  enum class Shape { rect, disk };
  Shape shape = Shape::rect;
  int center_row = 0;
  int center_col = 0;
  int height = 8;   // disk: diameter
  int width = 8;    // ignored for disks
  double amplitude = 0.5;
};

struct SynthSpec {
  enum class Background { sinusoidal, rectangles };

  int n = 128;
  Background background = Background::sinusoidal;

  // sinusoidal: scale * (sin(2 pi i / t1) + cos(2 pi j / t2)) + offset.
  // The defaults map the raw [-2, 2] range onto [0, 1].
  double t1 = 32.0;
  double t2 = 32.0;
  double sin_scale = 0.25;
  double sin_offset = 0.5;

  // rectangles: a checkerboard of width x height tiles at two levels.
  int rect_width = 25;
  int rect_height = 20;
  double rect_hi = 0.8;
  double rect_lo = 0.2;

  double noise_sigma = 0.01;
  std::vector<AnomalySpec> anomalies;
  uint64_t seed = 0;

  void validate() const;
};

struct GroundTruth {
  MatrixXd clean;           // background as used in the observed sum
  MatrixXd noise;           // E
  MatrixXd anomaly_values;  // added amplitudes, zero off the mask
  BoolMatrixM anomaly_mask;
};

/// Background value before any rescaling (sinusoidal: the raw sin + cos in
/// [-2, 2]; rectangles: the tile level). Integer-period backgrounds are
/// evaluated through modular reduction, so periodicity is bit-exact.
double background_raw(const SynthSpec& spec, int i, int j);

/// Deterministic synthesis: observed = clean + anomaly_values + noise holds
/// exactly as written.
std::pair<MatrixXd, GroundTruth> generate(const SynthSpec& spec);

/// The default anomaly planting used by the evaluation suites: `count`
/// non-overlapping axis-aligned rectangles with edges in [8, 20] px and
/// amplitude +-0.5.
std::vector<AnomalySpec> plant_random_rectangles(int n, int count, Rng& rng,
                                                 double amplitude = 0.5,
                                                 int edge_min = 8,
                                                 int edge_max = 20);

}  // namespace psd
