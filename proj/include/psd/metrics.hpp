#pragma once

#include <Eigen/Dense>

#include "psd/errors.hpp"

namespace psd {

using Eigen::MatrixXd;
using BoolMatrixM = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Pixel-level confusion counts and the four derived rates. Conventions for
/// empty denominators: FOR and FNR report 0, each balanced-accuracy half
/// with an empty class contributes 0.5, and DICE of two empty masks is 1.
struct MetricSet {
  long long tp = 0, fp = 0, tn = 0, fn = 0;
  double for_rate = 0.0;  // FP / (TP + FP)
  double fnr = 0.0;       // FN / (TP + FN)
  double ba = 0.0;        // TP / 2(TP+FN) + TN / 2(TN+FP)
  double dice = 0.0;      // 2 TP / (FP + FN + 2 TP)
};

MetricSet compute_metrics(const BoolMatrixM& mask, const BoolMatrixM& gt);

/// Aggregate statistics of a reconstruction run: the noise realization and
/// the clean-minus-reference difference.
struct ReconstructionStats {
  double sigma_e = 0.0;    // std of the noise entries
  double max_e = 0.0;      // ||E||_inf
  double mu_r = 0.0;       // mean of clean - reference
  double sigma_r = 0.0;    // std of clean - reference
  double max_diff = 0.0;   // ||clean - reference||_inf
};

ReconstructionStats reconstruction_stats(const MatrixXd& clean,
                                         const MatrixXd& reference,
                                         const MatrixXd& noise);

}  // namespace psd
