#include "psd/synthetic.hpp"

#include <cmath>

namespace psd {

void SynthSpec::validate() const {
  if (n < 8) throw ConfigError("synth: n must be >= 8");
  if (background == Background::sinusoidal) {
    if (t1 < 2.0 || t2 < 2.0) throw ConfigError("synth: periods must be >= 2");
  } else {
    if (rect_width < 1 || rect_height < 1)
      throw ConfigError("synth: tile dimensions must be >= 1");
  }
  if (noise_sigma < 0) throw ConfigError("synth: noise_sigma must be >= 0");
  for (const AnomalySpec& a : anomalies) {
    const int hr = a.shape == AnomalySpec::Shape::disk ? a.height / 2 : a.height / 2;
    const int hc = a.shape == AnomalySpec::Shape::disk ? a.height / 2 : a.width / 2;
    if (a.center_row - hr < 0 || a.center_row + hr >= n || a.center_col - hc < 0 ||
        a.center_col + hc >= n)
      throw ConfigError("synth: anomaly does not fit inside the frame");
    if (a.height < 1 || (a.shape == AnomalySpec::Shape::rect && a.width < 1))
      throw ConfigError("synth: anomaly size must be >= 1");
  }
}

double background_raw(const SynthSpec& spec, int i, int j) {
  if (spec.background == SynthSpec::Background::sinusoidal) {
    const double pi = std::fmod(static_cast<double>(i), spec.t1);
    const double pj = std::fmod(static_cast<double>(j), spec.t2);
    return std::sin(2.0 * M_PI * pi / spec.t1) + std::cos(2.0 * M_PI * pj / spec.t2);
  }
  const bool bright = ((i / spec.rect_height) + (j / spec.rect_width)) % 2 == 0;
  return bright ? spec.rect_hi : spec.rect_lo;
}

std::pair<MatrixXd, GroundTruth> generate(const SynthSpec& spec) {
  spec.validate();
  const int n = spec.n;
  GroundTruth gt;
  gt.clean.resize(n, n);
  gt.noise.resize(n, n);
  gt.anomaly_values = MatrixXd::Zero(n, n);
  gt.anomaly_mask = BoolMatrixM::Constant(n, n, false);

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = background_raw(spec, i, j);
      if (spec.background == SynthSpec::Background::sinusoidal)
        v = spec.sin_scale * v + spec.sin_offset;
      gt.clean(i, j) = v;
    }

  Rng rng(spec.seed);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) gt.noise(i, j) = spec.noise_sigma * rng.normal();

  for (const AnomalySpec& a : spec.anomalies) {
    if (a.shape == AnomalySpec::Shape::rect) {
      const int r0 = a.center_row - a.height / 2;
      const int c0 = a.center_col - a.width / 2;
      for (int i = r0; i < r0 + a.height; ++i)
        for (int j = c0; j < c0 + a.width; ++j) {
          gt.anomaly_values(i, j) = a.amplitude;
          gt.anomaly_mask(i, j) = true;
        }
    } else {
      const double radius = a.height / 2.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double dr = i - a.center_row, dc = j - a.center_col;
          if (dr * dr + dc * dc <= radius * radius) {
            gt.anomaly_values(i, j) = a.amplitude;
            gt.anomaly_mask(i, j) = true;
          }
        }
    }
  }

  MatrixXd observed = gt.clean + gt.anomaly_values + gt.noise;
  return {std::move(observed), std::move(gt)};
}

std::vector<AnomalySpec> plant_random_rectangles(int n, int count, Rng& rng,
                                                 double amplitude, int edge_min,
                                                 int edge_max) {
  std::vector<AnomalySpec> out;
  BoolMatrixM occupied = BoolMatrixM::Constant(n, n, false);
  int attempts = 0;
  while (static_cast<int>(out.size()) < count && attempts < 200) {
    ++attempts;
    AnomalySpec a;
    a.shape = AnomalySpec::Shape::rect;
    a.height = static_cast<int>(rng.uniform_int(edge_min, edge_max));
    a.width = static_cast<int>(rng.uniform_int(edge_min, edge_max));
    a.center_row = static_cast<int>(rng.uniform_int(a.height / 2 + 1, n - a.height / 2 - 2));
    a.center_col = static_cast<int>(rng.uniform_int(a.width / 2 + 1, n - a.width / 2 - 2));
    a.amplitude = rng.uniform() < 0.5 ? amplitude : -amplitude;

    const int r0 = a.center_row - a.height / 2, c0 = a.center_col - a.width / 2;
    bool clash = false;
    for (int i = std::max(0, r0 - 2); i < std::min(n, r0 + a.height + 2) && !clash; ++i)
      for (int j = std::max(0, c0 - 2); j < std::min(n, c0 + a.width + 2) && !clash; ++j)
        clash = occupied(i, j);
    if (clash) continue;
    for (int i = r0; i < r0 + a.height; ++i)
      for (int j = c0; j < c0 + a.width; ++j) occupied(i, j) = true;
    out.push_back(a);
  }
  return out;
}

}  // namespace psd
