#include "psd/metrics.hpp"

#include <cmath>

namespace psd {

MetricSet compute_metrics(const BoolMatrixM& mask, const BoolMatrixM& gt) {
  if (mask.rows() != gt.rows() || mask.cols() != gt.cols())
    throw DimensionError("compute_metrics: mask/ground-truth shape mismatch");
  MetricSet m;
  for (Eigen::Index j = 0; j < mask.cols(); ++j)
    for (Eigen::Index i = 0; i < mask.rows(); ++i) {
      const bool pred = mask(i, j), truth = gt(i, j);
      if (pred && truth)
        ++m.tp;
      else if (pred && !truth)
        ++m.fp;
      else if (!pred && truth)
        ++m.fn;
      else
        ++m.tn;
    }
  m.for_rate = (m.tp + m.fp) > 0 ? static_cast<double>(m.fp) / (m.tp + m.fp) : 0.0;
  m.fnr = (m.tp + m.fn) > 0 ? static_cast<double>(m.fn) / (m.tp + m.fn) : 0.0;
  const double pos_half =
      (m.tp + m.fn) > 0 ? 0.5 * m.tp / static_cast<double>(m.tp + m.fn) : 0.5;
  const double neg_half =
      (m.tn + m.fp) > 0 ? 0.5 * m.tn / static_cast<double>(m.tn + m.fp) : 0.5;
  m.ba = pos_half + neg_half;
  const long long dice_den = m.fp + m.fn + 2 * m.tp;
  m.dice = dice_den > 0 ? 2.0 * m.tp / static_cast<double>(dice_den) : 1.0;
  return m;
}

ReconstructionStats reconstruction_stats(const MatrixXd& clean,
                                         const MatrixXd& reference,
                                         const MatrixXd& noise) {
  if (clean.rows() != reference.rows() || clean.cols() != reference.cols() ||
      clean.rows() != noise.rows() || clean.cols() != noise.cols())
    throw DimensionError("reconstruction_stats: shape mismatch");
  ReconstructionStats s;
  const double ne_mean = noise.mean();
  s.sigma_e = std::sqrt((noise.array() - ne_mean).square().mean());
  s.max_e = noise.cwiseAbs().maxCoeff();
  const MatrixXd diff = clean - reference;
  s.mu_r = diff.mean();
  s.sigma_r = std::sqrt((diff.array() - s.mu_r).square().mean());
  s.max_diff = diff.cwiseAbs().maxCoeff();
  return s;
}

}  // namespace psd
